//! Bounded verification that the enumerated classes form an adapted family
//! for the pair (subgroups conjugate into a factor, virtually cyclic
//! subgroups).
//!
//! Axioms checked, with conjugators of at most `conj_bound` syllables:
//!
//! 1. distinct members intersect in a finite group (one fixing a vertex);
//! 2. one representative per conjugacy class;
//! 3. each member is self-normalizing;
//! 4. every hyperbolic element up to the enumeration bound has its axis
//!    conjugate to a representative's axis.

use serde::Serialize;

use super::{axes_conjugate, NilIndexError, VcClass};
use crate::amalgam::{AmalgamSpec, NormalForm};
use crate::dynamics::{self, DynamicsError, StabilizedAxis};
use crate::exec::Execution;
use crate::tree::{self, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `conjugator * axis(first) = axis(second)` for distinct representatives.
    ConjugateRepresentatives {
        first: usize,
        second: usize,
        conjugator: NormalForm,
    },
    /// `V_first ∩ x V_second x^-1` fails to fix a vertex.
    IntersectionWithoutFixedPoint {
        first: usize,
        second: usize,
        conjugator: NormalForm,
    },
    /// An element preserving the axis that the presentation misses.
    NotSelfNormalizing { class: usize, element: NormalForm },
    /// A hyperbolic element whose axis matches no representative.
    Uncovered { element: NormalForm },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: u8,
    pub description: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedReport {
    pub max_syllables: usize,
    pub conj_bound: usize,
    pub classes: usize,
    pub axioms: Vec<AxiomResult>,
}

impl AdaptedReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn axiom(&self, n: u8) -> &AxiomResult {
        &self.axioms[usize::from(n) - 1]
    }
}

/// Outcome of intersecting `Stab(axis1)` with `Stab(x * axis2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    SameAxis,
    Finite { order: usize, fixed_vertex: Vertex },
    NoFixedPoint,
}

const WALK_CAP: usize = 4096;

/// Computes `Stab(axis1) ∩ Stab(x * axis2)` when the two axes differ.
///
/// Both axes are preserved by the intersection, so it preserves the set `P`
/// of vertices of axis 1 closest to `x * axis2` (a single vertex or a
/// finite overlap segment). Only the fixer of axis 1 and the one coset of
/// reflections swapping the ends of `P` can do that; those candidates are
/// filtered by membership in the second stabilizer.
pub fn intersect_stabilizers(
    spec: &AmalgamSpec,
    rep1: &StabilizedAxis,
    rep2: &StabilizedAxis,
    x: &NormalForm,
) -> Result<Intersection, NilIndexError> {
    let y = spec.conjugate(&rep2.axis.translator, x);
    let mu_y = rep2.axis.translation_length();
    if rep1.translates_along(spec, &y, mu_y) {
        return Ok(Intersection::SameAxis);
    }

    let disp = |p: i64| dynamics::displacement(spec, &y, &rep1.axis.vertex_at(spec, p));
    let runaway = || {
        NilIndexError::InconsistentStabilizer(format!(
            "no bounded closest segment between the axes of {} and {y}",
            rep1.axis.translator
        ))
    };
    let (mut p, mut d) = (0i64, disp(0));
    for step in 0.. {
        if step == WALK_CAP {
            return Err(runaway());
        }
        let (dl, dr) = (disp(p - 1), disp(p + 1));
        if dl < d {
            (p, d) = (p - 1, dl);
        } else if dr < d {
            (p, d) = (p + 1, dr);
        } else {
            break;
        }
    }
    let (mut lo, mut hi) = (p, p);
    while disp(lo - 1) == d {
        lo -= 1;
        if (p - lo) as usize > WALK_CAP {
            return Err(runaway());
        }
    }
    while disp(hi + 1) == d {
        hi += 1;
        if (hi - p) as usize > WALK_CAP {
            return Err(runaway());
        }
    }

    let stab = &rep1.stab;
    let mut candidates = stab.fixer.clone();
    if let (Some(r), Some(center)) = (&stab.reflection, stab.reflection_center) {
        let shift = stab.t_min_shift as i64;
        let offset = hi + lo - center;
        if offset.rem_euclid(shift) == 0 {
            let rho = spec.multiply(&spec.pow(&stab.t_min, offset / shift), r);
            candidates.extend(stab.fixer.iter().map(|f| spec.multiply(f, &rho)));
        }
    }
    let x_inv = spec.inverse(x);
    let members: Vec<NormalForm> = candidates
        .into_iter()
        .filter(|z| rep2.contains(spec, &spec.conjugate(z, &x_inv)))
        .collect();

    let mid = if (lo + hi) % 2 == 0 { (lo + hi) / 2 } else { lo };
    let fixed_vertex = rep1.axis.vertex_at(spec, mid);
    if members.iter().all(|z| tree::fixes_vertex(spec, z, &fixed_vertex)) {
        Ok(Intersection::Finite {
            order: members.len(),
            fixed_vertex,
        })
    } else {
        Ok(Intersection::NoFixedPoint)
    }
}

pub fn check_adapted(
    spec: &AmalgamSpec,
    classes: &[VcClass],
    max_syllables: usize,
    conj_bound: usize,
) -> Result<AdaptedReport, NilIndexError> {
    check_adapted_with(spec, classes, max_syllables, conj_bound, Execution::default())
}

pub fn check_adapted_with(
    spec: &AmalgamSpec,
    classes: &[VcClass],
    max_syllables: usize,
    conj_bound: usize,
    exec: Execution,
) -> Result<AdaptedReport, NilIndexError> {
    let conjugators = spec.normal_forms_up_to(conj_bound);
    let axioms = vec![
        axiom_intersections(spec, classes, &conjugators, exec)?,
        axiom_one_per_class(spec, classes, exec),
        axiom_self_normalizing(spec, classes, &conjugators, conj_bound, exec),
        axiom_covering(spec, classes, max_syllables, exec)?,
    ];
    Ok(AdaptedReport {
        max_syllables,
        conj_bound,
        classes: classes.len(),
        axioms,
    })
}

fn axiom_intersections(
    spec: &AmalgamSpec,
    classes: &[VcClass],
    conjugators: &[NormalForm],
    exec: Execution,
) -> Result<AxiomResult, NilIndexError> {
    let mut checks = 0;
    let mut witness = None;
    'pairs: for i in 0..classes.len() {
        for j in i..classes.len() {
            let outcomes = exec.try_map(conjugators, |x| {
                intersect_stabilizers(spec, &classes[i].rep, &classes[j].rep, x)
            })?;
            checks += outcomes.len();
            for (x, outcome) in conjugators.iter().zip(outcomes) {
                let bad = match outcome {
                    // Same axis means equal subgroups, which is fine for a
                    // class against its own conjugate.
                    Intersection::SameAxis if i != j => Some(Witness::ConjugateRepresentatives {
                        first: i,
                        second: j,
                        conjugator: spec.inverse(x),
                    }),
                    Intersection::NoFixedPoint => Some(Witness::IntersectionWithoutFixedPoint {
                        first: i,
                        second: j,
                        conjugator: x.clone(),
                    }),
                    _ => None,
                };
                if bad.is_some() {
                    witness = bad;
                    break 'pairs;
                }
            }
        }
    }
    Ok(AxiomResult {
        axiom: 1,
        description: "distinct members intersect in a finite subgroup fixing a vertex",
        passed: witness.is_none(),
        checks,
        witness,
    })
}

fn axiom_one_per_class(spec: &AmalgamSpec, classes: &[VcClass], exec: Execution) -> AxiomResult {
    let pairs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|i| (i + 1..classes.len()).map(move |j| (i, j)))
        .collect();
    let found = exec.map(&pairs, |&(i, j)| axes_conjugate(spec, &classes[i].rep, &classes[j].rep));
    let witness = pairs
        .iter()
        .zip(found)
        .find_map(|(&(first, second), c)| {
            c.map(|conjugator| Witness::ConjugateRepresentatives {
                first,
                second,
                conjugator,
            })
        });
    AxiomResult {
        axiom: 2,
        description: "one representative per conjugacy class (conjugacy closed by construction)",
        passed: witness.is_none(),
        checks: pairs.len(),
        witness,
    }
}

fn axiom_self_normalizing(
    spec: &AmalgamSpec,
    classes: &[VcClass],
    conjugators: &[NormalForm],
    conj_bound: usize,
    exec: Execution,
) -> AxiomResult {
    let mut checks = 0;
    let mut witness = None;
    for (i, class) in classes.iter().enumerate() {
        let rep = &class.rep;
        let max_power = (conj_bound + rep.axis.translation_length() + 4) as i64;
        let misses = exec.map(conjugators, |x| {
            let preserves = rep.contains(spec, x);
            (preserves, preserves && !rep.presented_contains(spec, x, max_power))
        });
        checks += misses.iter().filter(|m| m.0).count();
        if let Some(pos) = misses.iter().position(|m| m.1) {
            witness = Some(Witness::NotSelfNormalizing {
                class: i,
                element: conjugators[pos].clone(),
            });
            break;
        }
    }
    AxiomResult {
        axiom: 3,
        description: "every member is self-normalizing",
        passed: witness.is_none(),
        checks,
        witness,
    }
}

fn axiom_covering(
    spec: &AmalgamSpec,
    classes: &[VcClass],
    max_syllables: usize,
    exec: Execution,
) -> Result<AxiomResult, NilIndexError> {
    let words = spec.normal_forms_up_to(max_syllables);
    let covered = exec.try_map(&words, |w| -> Result<Option<bool>, DynamicsError> {
        if !dynamics::classify_element(spec, w)?.is_hyperbolic() {
            return Ok(None);
        }
        let sa = StabilizedAxis::of(spec, w)?;
        Ok(Some(classes.iter().any(|c| axes_conjugate(spec, &sa, &c.rep).is_some())))
    })?;
    let checks = covered.iter().flatten().count();
    let witness = words
        .iter()
        .zip(&covered)
        .find(|(_, c)| **c == Some(false))
        .map(|(w, _)| Witness::Uncovered { element: w.clone() });
    Ok(AxiomResult {
        axiom: 4,
        description: "every hyperbolic element lies in a conjugate of some member",
        passed: witness.is_none(),
        checks,
        witness,
    })
}
