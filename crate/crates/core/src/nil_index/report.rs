//! The splitting formula as a list of labelled summands.

use super::{enumerate_vc_classes_with, NilIndexError, VcClass, VcKind};
use crate::amalgam::{AmalgamSpec, Side};
use crate::exec::Execution;
use crate::groups::{Automorphism, Fingerprint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Truncation {
    pub max_syllables: usize,
    /// Only set when the tree is a line, where one class is provably all.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub class: VcClass,
    pub nil_label: String,
    pub v_prime_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingReport {
    pub name: String,
    pub left_label: String,
    pub summands: Vec<Summand>,
    pub truncation: Truncation,
}

/// `R` for the trivial group, `R[G]` otherwise.
pub fn group_ring(fp: &Fingerprint) -> String {
    if fp.is_trivial() {
        "R".into()
    } else {
        format!("R[{}]", fp.name)
    }
}

pub fn alpha_label(alpha: &Automorphism) -> String {
    if alpha.is_identity() {
        "id".into()
    } else {
        format!("alpha{:?}", alpha.as_slice())
    }
}

fn waldhausen_label(base: &Fingerprint, left: &Fingerprint, right: &Fingerprint) -> String {
    format!(
        "Nil^W({}; R[{} − {}], R[{} − {}])",
        group_ring(base),
        left.name,
        base.name,
        right.name,
        base.name
    )
}

pub fn left_label(spec: &AmalgamSpec) -> String {
    waldhausen_label(
        &spec.h.fingerprint(),
        &spec.group(Side::One).fingerprint(),
        &spec.group(Side::Two).fingerprint(),
    )
}

fn summand(class: VcClass) -> Summand {
    let (nil_label, v_prime_label) = match &class.kind {
        VcKind::Semidirect {
            f_fingerprint, alpha, ..
        } => (
            format!("2 × NK({}, {})", group_ring(f_fingerprint), alpha_label(alpha)),
            None,
        ),
        VcKind::DInfinity {
            a_fingerprint,
            b_fingerprint,
            c_fingerprint,
            alpha_prime,
            ..
        } => (
            waldhausen_label(c_fingerprint, a_fingerprint, b_fingerprint),
            Some(format!("NK({}, {})", group_ring(c_fingerprint), alpha_label(alpha_prime))),
        ),
    };
    Summand {
        class,
        nil_label,
        v_prime_label,
    }
}

pub fn splitting_report(spec: &AmalgamSpec, max_syllables: usize) -> Result<SplittingReport, NilIndexError> {
    splitting_report_with(spec, max_syllables, Execution::default())
}

pub fn splitting_report_with(
    spec: &AmalgamSpec,
    max_syllables: usize,
    exec: Execution,
) -> Result<SplittingReport, NilIndexError> {
    let classes = enumerate_vc_classes_with(spec, max_syllables, exec)?;
    Ok(SplittingReport {
        name: spec.name.clone(),
        left_label: left_label(spec),
        summands: classes.into_iter().map(summand).collect(),
        truncation: Truncation {
            max_syllables,
            complete: spec.indices() == (2, 2),
        },
    })
}
