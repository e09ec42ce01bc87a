//! How single elements and their axes sit in the tree.
//!
//! An element either fixes a vertex (elliptic) or translates a unique
//! bi-infinite geodesic, its axis, by its translation length (hyperbolic).
//! The stabilizer of an axis is presented as its pointwise fixer `F`, a
//! minimal forward translation, and an optional reflection.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::amalgam::{AmalgamSpec, NormalForm, Side};
use crate::tree::{self, Edge, TreePath, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("element {0} is elliptic and has no axis")]
    EllipticElement(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

/// Distance from `v` to `g v`.
pub fn displacement(spec: &AmalgamSpec, g: &NormalForm, v: &Vertex) -> usize {
    tree::distance(spec, v, &tree::act_vertex(spec, g, v))
}

/// The line `... g^-1 P, P, g P, g^2 P ...` through a minimally displaced
/// vertex, where `P` is the geodesic from `base` to `g base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub base: Vertex,
    pub period: TreePath,
    pub translator: NormalForm,
}

impl Axis {
    pub fn translation_length(&self) -> usize {
        self.period.len()
    }

    fn split(&self, p: i64) -> (i64, usize) {
        let mu = self.translation_length() as i64;
        (p.div_euclid(mu), p.rem_euclid(mu) as usize)
    }

    /// Vertex at integer position `p`; position 0 is `base`, and the
    /// translator moves position `p` to `p + translation_length`.
    pub fn vertex_at(&self, spec: &AmalgamSpec, p: i64) -> Vertex {
        let (q, r) = self.split(p);
        let v = &self.period.vertices[r];
        if q == 0 {
            v.clone()
        } else {
            tree::act_vertex(spec, &spec.pow(&self.translator, q), v)
        }
    }

    /// Edge between positions `p` and `p + 1`.
    pub fn edge_at(&self, spec: &AmalgamSpec, p: i64) -> Edge {
        let (q, r) = self.split(p);
        let e = &self.period.edges[r];
        if q == 0 {
            e.clone()
        } else {
            tree::act_edge(spec, &spec.pow(&self.translator, q), e)
        }
    }

    /// Vertices at positions `from..to`.
    pub fn vertices_in(&self, spec: &AmalgamSpec, from: i64, to: i64) -> Vec<Vertex> {
        (from..to).map(|p| self.vertex_at(spec, p)).collect()
    }

    /// A vertex lies on the axis exactly when the translator displaces it
    /// minimally.
    pub fn contains_vertex(&self, spec: &AmalgamSpec, v: &Vertex) -> bool {
        displacement(spec, &self.translator, v) == self.translation_length()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementAction {
    Elliptic { fixed_vertex: Vertex },
    Hyperbolic { translation_length: usize, axis: Axis },
}

impl ElementAction {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, ElementAction::Hyperbolic { .. })
    }

    pub fn translation_length(&self) -> usize {
        match self {
            ElementAction::Elliptic { .. } => 0,
            ElementAction::Hyperbolic { translation_length, .. } => *translation_length,
        }
    }
}

/// Walks downhill on `v -> d(v, g v)` from the base vertex of `G1`.
///
/// Each step moves to the neighbour of least displacement (ties to the
/// smallest key) while that strictly improves. The displacement function
/// is convex, so each step drops it by exactly 2 and the walk stops on the
/// fixed set or on the axis.
pub fn classify_element(spec: &AmalgamSpec, g: &NormalForm) -> Result<ElementAction, DynamicsError> {
    let mut v = Vertex::base(Side::One);
    let mut d = displacement(spec, g, &v);
    while d > 0 {
        let (best_d, best) = tree::neighbors(spec, &v)
            .into_iter()
            .map(|(_, w)| (displacement(spec, g, &w), w))
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
            .expect("vertices have at least two neighbours");
        if best_d >= d {
            break;
        }
        if d - best_d != 2 {
            return Err(DynamicsError::InvariantViolation(format!(
                "downhill step for {g} went from {d} to {best_d}"
            )));
        }
        v = best;
        d = best_d;
    }
    if d == 0 {
        return Ok(ElementAction::Elliptic { fixed_vertex: v });
    }
    let period = tree::geodesic_path(spec, &v, &tree::act_vertex(spec, g, &v));
    Ok(ElementAction::Hyperbolic {
        translation_length: d,
        axis: Axis {
            base: v,
            period,
            translator: g.clone(),
        },
    })
}

pub fn axis_of(spec: &AmalgamSpec, g: &NormalForm) -> Result<Axis, DynamicsError> {
    match classify_element(spec, g)? {
        ElementAction::Hyperbolic { axis, .. } => Ok(axis),
        ElementAction::Elliptic { .. } => Err(DynamicsError::EllipticElement(g.to_string())),
    }
}

/// Pointwise fixer of the whole axis, sorted.
///
/// `F_m` fixes the periods at offsets `-m..=m`. Once `F_{m+1} = F_m` the
/// chain is constant from then on: conjugating by the translator shifts the
/// window by one period in either direction.
pub fn fix_of_axis(spec: &AmalgamSpec, axis: &Axis) -> Result<Vec<NormalForm>, DynamicsError> {
    let period_edges = &axis.period.edges;
    let mut current: Vec<NormalForm> = tree::edge_stabilizer(spec, &period_edges[0])
        .into_iter()
        .filter(|f| period_edges[1..].iter().all(|e| tree::fixes_edge(spec, f, e)))
        .collect();
    let cap = spec.h_order() + 2;
    for m in 1..=cap as i64 {
        let shifted: Vec<Edge> = [m, -m]
            .iter()
            .flat_map(|&k| {
                let gk = spec.pow(&axis.translator, k);
                period_edges.iter().map(move |e| (gk.clone(), e))
            })
            .map(|(gk, e)| tree::act_edge(spec, &gk, e))
            .collect();
        let next: Vec<NormalForm> = current
            .iter()
            .filter(|f| shifted.iter().all(|e| tree::fixes_edge(spec, f, e)))
            .cloned()
            .collect();
        if next.len() == current.len() {
            current.sort();
            return Ok(current);
        }
        current = next;
    }
    Err(DynamicsError::InvariantViolation(format!(
        "fixer of the axis of {} did not stabilize within {cap} periods",
        axis.translator
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimType {
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "D_infinity")]
    DInfinity,
}

impl fmt::Display for SimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimType::Z => "Z",
            SimType::DInfinity => "D_infinity",
        })
    }
}

/// Direction in which an axis-preserving element moves the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reversed,
}

/// `Stab(axis)` as `F`, a minimal forward translation, and optionally a
/// reflection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicStab {
    pub fixer: Vec<NormalForm>,
    pub t_min: NormalForm,
    /// Positions moved by `t_min`.
    pub t_min_shift: usize,
    pub reflection: Option<NormalForm>,
    /// The reflection sends position `p` to `center - p`.
    pub reflection_center: Option<i64>,
    pub sim_type: SimType,
}

/// An axis together with its stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizedAxis {
    pub axis: Axis,
    pub stab: GeodesicStab,
}

impl StabilizedAxis {
    pub fn of(spec: &AmalgamSpec, g: &NormalForm) -> Result<Self, DynamicsError> {
        let axis = axis_of(spec, g)?;
        let stab = geodesic_stabilizer(spec, &axis)?;
        Ok(Self { axis, stab })
    }

    pub fn fixer_contains(&self, x: &NormalForm) -> bool {
        self.stab.fixer.binary_search(x).is_ok()
    }

    /// Whether `z` maps the axis onto itself, and in which direction.
    ///
    /// `z` preserves the axis iff `z g z^-1` translates it like `g` or like
    /// `g^-1`, i.e. iff `z g z^-1 g^-1` or `z g z^-1 g` fixes it pointwise.
    pub fn orientation_of(&self, spec: &AmalgamSpec, z: &NormalForm) -> Option<Orientation> {
        orientation_under(spec, &self.axis.translator, &self.stab.fixer, z)
    }

    pub fn contains(&self, spec: &AmalgamSpec, z: &NormalForm) -> bool {
        self.orientation_of(spec, z).is_some()
    }

    /// Whether the hyperbolic element `y`, with translation length `mu_y`,
    /// translates along this axis: `y = f t_min^k` for some `f` in `F`.
    pub fn translates_along(&self, spec: &AmalgamSpec, y: &NormalForm, mu_y: usize) -> bool {
        let shift = self.stab.t_min_shift;
        if !mu_y.is_multiple_of(shift) {
            return false;
        }
        let k = (mu_y / shift) as i64;
        [k, -k].iter().any(|&e| {
            let rest = spec.multiply(y, &spec.pow(&self.stab.t_min, -e));
            self.fixer_contains(&rest)
        })
    }

    /// Membership in the presented set `F <t_min> u F <t_min> r`, trying
    /// powers `|k| <= max_power`.
    pub fn presented_contains(&self, spec: &AmalgamSpec, x: &NormalForm, max_power: i64) -> bool {
        (-max_power..=max_power).any(|k| {
            let tk = spec.pow(&self.stab.t_min, k);
            if self.fixer_contains(&spec.multiply(x, &spec.inverse(&tk))) {
                return true;
            }
            match &self.stab.reflection {
                Some(r) => {
                    let tkr = spec.multiply(&tk, r);
                    self.fixer_contains(&spec.multiply(x, &spec.inverse(&tkr)))
                }
                None => false,
            }
        })
    }
}

fn orientation_under(
    spec: &AmalgamSpec,
    g: &NormalForm,
    fixer: &[NormalForm],
    z: &NormalForm,
) -> Option<Orientation> {
    let w = spec.conjugate(g, z);
    if fixer.binary_search(&spec.multiply(&w, &spec.inverse(g))).is_ok() {
        Some(Orientation::Forward)
    } else if fixer.binary_search(&spec.multiply(&w, g)).is_ok() {
        Some(Orientation::Reversed)
    } else {
        None
    }
}

fn least(cands: Vec<NormalForm>) -> Option<NormalForm> {
    cands.into_iter().min_by(NormalForm::shortlex_cmp)
}

/// Presents `Stab(axis)`.
///
/// `t_min` is found among the transporters from the first period edge to
/// the edges one to `translation_length` steps ahead, keeping the first
/// offset that admits a forward axis-preserving candidate. Reflections are
/// searched among the transporters to edges at offsets `-mu..=mu`, keeping
/// orientation-reversing candidates. Ties go to the shortlex-least element.
pub fn geodesic_stabilizer(spec: &AmalgamSpec, axis: &Axis) -> Result<GeodesicStab, DynamicsError> {
    let fixer = fix_of_axis(spec, axis)?;
    let g = &axis.translator;
    let mu = axis.translation_length() as i64;
    let e0 = axis.edge_at(spec, 0);

    let mut t_min = None;
    for j in 1..=mu {
        let cands: Vec<NormalForm> = tree::transporter(spec, &e0, &axis.edge_at(spec, j))
            .into_iter()
            .filter(|c| orientation_under(spec, g, &fixer, c) == Some(Orientation::Forward))
            .collect();
        if let Some(t) = least(cands) {
            t_min = Some((t, j as usize));
            break;
        }
    }
    let (t_min, t_min_shift) = t_min.ok_or_else(|| {
        DynamicsError::InvariantViolation(format!("no forward translation found for the axis of {g}"))
    })?;

    let mut reflections: Vec<(NormalForm, i64)> = Vec::new();
    for j in -mu..=mu {
        for c in tree::transporter(spec, &e0, &axis.edge_at(spec, j)) {
            if orientation_under(spec, g, &fixer, &c) == Some(Orientation::Reversed) {
                reflections.push((c, j + 1));
            }
        }
    }
    let reflection = reflections
        .into_iter()
        .min_by(|a, b| a.0.shortlex_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let stab = GeodesicStab {
        sim_type: if reflection.is_some() {
            SimType::DInfinity
        } else {
            SimType::Z
        },
        reflection_center: reflection.as_ref().map(|r| r.1),
        reflection: reflection.map(|r| r.0),
        fixer,
        t_min,
        t_min_shift,
    };
    verify_stab(spec, axis, &stab)?;
    Ok(stab)
}

fn verify_stab(spec: &AmalgamSpec, axis: &Axis, stab: &GeodesicStab) -> Result<(), DynamicsError> {
    let in_fixer = |x: &NormalForm| stab.fixer.binary_search(x).is_ok();
    let violation = |what: &str| {
        Err(DynamicsError::InvariantViolation(format!(
            "stabilizer of the axis of {}: {what}",
            axis.translator
        )))
    };
    if !stab
        .fixer
        .iter()
        .all(|f| in_fixer(&spec.conjugate(f, &stab.t_min)))
    {
        return violation("t_min does not normalize the fixer");
    }
    let moved = tree::act_vertex(spec, &stab.t_min, &axis.base);
    if moved != axis.vertex_at(spec, stab.t_min_shift as i64) {
        return violation("t_min does not translate by its recorded shift");
    }
    if let (Some(r), Some(center)) = (&stab.reflection, stab.reflection_center) {
        if !in_fixer(&spec.multiply(r, r)) {
            return violation("reflection squared is not in the fixer");
        }
        let twisted = spec.multiply(&spec.conjugate(&stab.t_min, r), &stab.t_min);
        if !in_fixer(&twisted) {
            return violation("reflection does not invert t_min modulo the fixer");
        }
        if tree::act_vertex(spec, r, &axis.base) != axis.vertex_at(spec, center) {
            return violation("reflection does not send position 0 to its recorded center");
        }
    }
    Ok(())
}
