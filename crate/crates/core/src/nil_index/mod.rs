//! Maximal infinite virtually cyclic subgroups up to conjugacy.
//!
//! Each class is represented by the stabilizer of the axis of a hyperbolic
//! element. Classes are enumerated from translators up to a syllable bound,
//! deduplicated by axis conjugacy, and split into the `F x| Z` and
//! `A *_C B` (surjecting onto `D_infinity`) types.

mod adapted;
mod report;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::amalgam::{AmalgamSpec, NormalForm};
use crate::dynamics::{self, DynamicsError, StabilizedAxis};
use crate::exec::Execution;
use crate::groups::{Automorphism, FiniteGroup, Fingerprint};
use crate::tree;

pub use adapted::{check_adapted, check_adapted_with, AdaptedReport, AxiomResult, Witness};
pub use report::{alpha_label, group_ring, left_label, splitting_report, splitting_report_with, Summand, SplittingReport, Truncation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilIndexError {
    #[error("no hyperbolic element has at most {bound} syllables")]
    BoundTooSmall { bound: usize },
    #[error("inconsistent stabilizer: {0}")]
    InconsistentStabilizer(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Structural constraints on a class: the finite normal part sits inside
/// edge stabilizers along the axis, and (for the dihedral type) `A` and `B`
/// each fix a cell of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ConstraintFlags {
    pub fixer_in_edge_stabilizers: bool,
    pub a_fixes_cell: Option<bool>,
    pub b_fixes_cell: Option<bool>,
}

impl ConstraintFlags {
    pub fn all_hold(&self) -> bool {
        self.fixer_in_edge_stabilizers && self.a_fixes_cell != Some(false) && self.b_fixes_cell != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VcKind {
    /// `V = A *_C B` with `C` the fixer and `[A : C] = [B : C] = 2`.
    DInfinity {
        a: Vec<NormalForm>,
        b: Vec<NormalForm>,
        c: Vec<NormalForm>,
        reflection: NormalForm,
        a_fingerprint: Fingerprint,
        b_fingerprint: Fingerprint,
        c_fingerprint: Fingerprint,
        /// Conjugation by `t_min` on `C`: the index-two subgroup
        /// `V' = C x| <t_min>`.
        alpha_prime: Automorphism,
    },
    /// `V = F x|_alpha Z` with `F` the fixer and `alpha` conjugation by `t`.
    Semidirect {
        f: Vec<NormalForm>,
        f_fingerprint: Fingerprint,
        alpha: Automorphism,
        t: NormalForm,
    },
}

/// One conjugacy class of maximal infinite virtually cyclic subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcClass {
    pub rep: StabilizedAxis,
    pub min_word: NormalForm,
    pub kind: VcKind,
    pub constraints: ConstraintFlags,
}

impl VcClass {
    /// The class of the axis of `g`, represented by `g` itself.
    pub fn from_translator(spec: &AmalgamSpec, g: &NormalForm) -> Result<Self, NilIndexError> {
        classify_vc(spec, StabilizedAxis::of(spec, g)?, g.clone())
    }

    pub fn is_dihedral(&self) -> bool {
        matches!(self.kind, VcKind::DInfinity { .. })
    }

    /// The finite normal subgroup: `F`, or `C` for the dihedral type.
    pub fn fixer(&self) -> &[NormalForm] {
        &self.rep.stab.fixer
    }

    pub fn fixer_fingerprint(&self) -> &Fingerprint {
        match &self.kind {
            VcKind::DInfinity { c_fingerprint, .. } => c_fingerprint,
            VcKind::Semidirect { f_fingerprint, .. } => f_fingerprint,
        }
    }

    /// Conjugation by `t_min` on the fixer (`alpha`, or `alpha'`).
    pub fn twist(&self) -> &Automorphism {
        match &self.kind {
            VcKind::DInfinity { alpha_prime, .. } => alpha_prime,
            VcKind::Semidirect { alpha, .. } => alpha,
        }
    }
}

/// The abstract group on a finite set of amalgam elements, numbered in the
/// given order. The first element must be the identity.
pub fn subset_group(spec: &AmalgamSpec, elements: &[NormalForm]) -> Result<FiniteGroup, NilIndexError> {
    if elements.first().is_none_or(|e| !e.is_identity()) {
        return Err(NilIndexError::InconsistentStabilizer(
            "subgroup listing does not start with the identity".into(),
        ));
    }
    let index: HashMap<&NormalForm, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut rows = Vec::with_capacity(elements.len());
    for a in elements {
        let mut row = Vec::with_capacity(elements.len());
        for b in elements {
            let ab = spec.multiply(a, b);
            match index.get(&ab) {
                Some(&k) => row.push(k),
                None => {
                    return Err(NilIndexError::InconsistentStabilizer(format!(
                        "set is not closed: {a} * {b} = {ab}"
                    )))
                }
            }
        }
        rows.push(row);
    }
    FiniteGroup::from_table_capped(&rows, usize::MAX)
        .map_err(|e| NilIndexError::InconsistentStabilizer(e.to_string()))
}

fn conjugation_automorphism(
    spec: &AmalgamSpec,
    group: &FiniteGroup,
    elements: &[NormalForm],
    by: &NormalForm,
) -> Result<Automorphism, NilIndexError> {
    let map: Result<Vec<usize>, NilIndexError> = elements
        .iter()
        .map(|f| {
            let image = spec.conjugate(f, by);
            elements.iter().position(|e| *e == image).ok_or_else(|| {
                NilIndexError::InconsistentStabilizer(format!("{by} does not normalize the fixer"))
            })
        })
        .collect();
    Automorphism::new(group, &map?).map_err(|e| NilIndexError::InconsistentStabilizer(e.to_string()))
}

fn fixes_some_cell(spec: &AmalgamSpec, rep: &StabilizedAxis, set: &[NormalForm]) -> bool {
    let mu = rep.axis.translation_length() as i64;
    (-2 * mu..=3 * mu).any(|p| {
        let v = rep.axis.vertex_at(spec, p);
        let e = rep.axis.edge_at(spec, p);
        set.iter().all(|x| tree::fixes_vertex(spec, x, &v)) || set.iter().all(|x| tree::fixes_edge(spec, x, &e))
    })
}

fn coset_union(spec: &AmalgamSpec, c: &[NormalForm], r: &NormalForm) -> Vec<NormalForm> {
    let set: BTreeSet<NormalForm> = c
        .iter()
        .cloned()
        .chain(c.iter().map(|x| spec.multiply(x, r)))
        .collect();
    set.into_iter().collect()
}

/// Splits an axis stabilizer into its virtually cyclic type.
pub fn classify_vc(
    spec: &AmalgamSpec,
    rep: StabilizedAxis,
    min_word: NormalForm,
) -> Result<VcClass, NilIndexError> {
    let stab = &rep.stab;
    let fixer = stab.fixer.clone();
    let fixer_group = subset_group(spec, &fixer)?;
    let twist = conjugation_automorphism(spec, &fixer_group, &fixer, &stab.t_min)?;

    let mu = rep.axis.translation_length() as i64;
    let fixer_in_edge_stabilizers = (-mu..2 * mu).all(|p| {
        let e = rep.axis.edge_at(spec, p);
        fixer.iter().all(|f| tree::fixes_edge(spec, f, &e))
    });

    let (kind, constraints) = match &stab.reflection {
        Some(r) => {
            let a = coset_union(spec, &fixer, r);
            let tr = spec.multiply(&stab.t_min, r);
            let b = coset_union(spec, &fixer, &tr);
            if a.len() != 2 * fixer.len() || b.len() != 2 * fixer.len() {
                return Err(NilIndexError::InconsistentStabilizer(format!(
                    "|A| = {}, |B| = {}, |C| = {}",
                    a.len(),
                    b.len(),
                    fixer.len()
                )));
            }
            let a_group = subset_group(spec, &a)?;
            let b_group = subset_group(spec, &b)?;
            let flags = ConstraintFlags {
                fixer_in_edge_stabilizers,
                a_fixes_cell: Some(fixes_some_cell(spec, &rep, &a)),
                b_fixes_cell: Some(fixes_some_cell(spec, &rep, &b)),
            };
            (
                VcKind::DInfinity {
                    a_fingerprint: a_group.fingerprint(),
                    b_fingerprint: b_group.fingerprint(),
                    c_fingerprint: fixer_group.fingerprint(),
                    a,
                    b,
                    c: fixer,
                    reflection: r.clone(),
                    alpha_prime: twist,
                },
                flags,
            )
        }
        None => (
            VcKind::Semidirect {
                f_fingerprint: fixer_group.fingerprint(),
                f: fixer,
                alpha: twist,
                t: stab.t_min.clone(),
            },
            ConstraintFlags {
                fixer_in_edge_stabilizers,
                a_fixes_cell: None,
                b_fixes_cell: None,
            },
        ),
    };
    Ok(VcClass {
        rep,
        min_word,
        kind,
        constraints,
    })
}

/// An element `c` with `c * axis1 = axis2`, if one exists.
///
/// Any such `c`, corrected by a power of `t_min` of the second axis, maps
/// the first edge of axis 1 into one period of axis 2, so it is enough to
/// try the transporters into that window. A candidate is accepted when
/// `c g1 c^-1` translates along axis 2.
pub fn axes_conjugate(spec: &AmalgamSpec, rep1: &StabilizedAxis, rep2: &StabilizedAxis) -> Option<NormalForm> {
    if rep1.stab.t_min_shift != rep2.stab.t_min_shift || rep1.stab.sim_type != rep2.stab.sim_type {
        return None;
    }
    let g1 = &rep1.axis.translator;
    let mu1 = rep1.axis.translation_length();
    let e0 = rep1.axis.edge_at(spec, 0);
    for j in 0..rep2.axis.translation_length() as i64 {
        for c in tree::transporter(spec, &e0, &rep2.axis.edge_at(spec, j)) {
            if rep2.translates_along(spec, &spec.conjugate(g1, &c), mu1) {
                return Some(c);
            }
        }
    }
    None
}

/// Cyclically reduced cores of all hyperbolic elements with at most
/// `max_syllables` syllables, sorted and deduplicated.
pub fn hyperbolic_cores(
    spec: &AmalgamSpec,
    max_syllables: usize,
    exec: Execution,
) -> Result<Vec<NormalForm>, NilIndexError> {
    let words = spec.normal_forms_up_to(max_syllables);
    let cores = exec.try_map(&words, |w| -> Result<Option<NormalForm>, DynamicsError> {
        Ok(dynamics::classify_element(spec, w)?
            .is_hyperbolic()
            .then(|| spec.cyclic_reduce(w).0))
    })?;
    let set: BTreeSet<NormalForm> = cores.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

pub fn enumerate_vc_classes(spec: &AmalgamSpec, max_syllables: usize) -> Result<Vec<VcClass>, NilIndexError> {
    enumerate_vc_classes_with(spec, max_syllables, Execution::default())
}

/// Enumerates classes from translators of bounded length.
///
/// Axes are computed in parallel; deduplication walks the sorted cores
/// sequentially so the first core of each class (its least translator)
/// becomes the representative, independent of scheduling.
pub fn enumerate_vc_classes_with(
    spec: &AmalgamSpec,
    max_syllables: usize,
    exec: Execution,
) -> Result<Vec<VcClass>, NilIndexError> {
    if max_syllables < 2 {
        return Err(NilIndexError::BoundTooSmall { bound: max_syllables });
    }
    let cores = hyperbolic_cores(spec, max_syllables, exec)?;
    if cores.is_empty() {
        return Err(NilIndexError::BoundTooSmall { bound: max_syllables });
    }
    let axes = exec.try_map(&cores, |g| StabilizedAxis::of(spec, g))?;

    let mut reps: Vec<(NormalForm, StabilizedAxis)> = Vec::new();
    for (core, sa) in cores.into_iter().zip(axes) {
        let known = exec
            .map(&reps, |(_, r)| axes_conjugate(spec, &sa, r).is_some())
            .into_iter()
            .any(|hit| hit);
        if !known {
            reps.push((core, sa));
        }
    }
    exec.try_map(&reps, |(core, sa)| classify_vc(spec, sa.clone(), core.clone()))
}
