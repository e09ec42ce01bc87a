//! Amalgamated free products `G1 *_H G2` of finite groups acting on their
//! Bass-Serre tree, and the conjugacy classes of maximal infinite virtually
//! cyclic subgroups that are not conjugate into a factor.
//!
//! The pipeline runs [`groups`] → [`amalgam`] → [`tree`] → [`dynamics`] →
//! [`nil_index`], with [`cli`] on top.

pub mod amalgam;
pub mod cli;
pub mod dynamics;
pub mod exec;
pub mod groups;
pub mod nil_index;
pub mod tree;
