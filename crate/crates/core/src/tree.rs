//! The Bass-Serre tree of `G1 *_H G2`.
//!
//! Vertices are the cosets `gG1`, `gG2` and edges the cosets `gH`. A cell is
//! named by the canonical syllable prefix of any of its coset elements; the
//! tree itself is never materialized.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::amalgam::{AmalgamSpec, NormalForm, Side, Syllable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid path length {k} for ball radius {radius} (need 1 <= k <= 2 * radius)")]
    InvalidPathLength { k: usize, radius: usize },
}

/// The vertex `w * G_side`. `key` never ends in a syllable from `side`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub key: Vec<Syllable>,
    pub side: Side,
}

/// The edge `w * H`, joining `w * G1` and `w * G2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub key: Vec<Syllable>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Vertex(Vertex),
    Edge(Edge),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Vertex(Side),
    Edge,
}

fn drop_trailing(key: &[Syllable], side: Side) -> Vec<Syllable> {
    match key.last() {
        Some(last) if last.side == side => key[..key.len() - 1].to_vec(),
        _ => key.to_vec(),
    }
}

fn word(key: &[Syllable]) -> String {
    key.iter().map(Syllable::to_string).collect::<Vec<_>>().join(" ")
}

impl Vertex {
    pub fn base(side: Side) -> Self {
        Self { key: Vec::new(), side }
    }

    pub fn of(g: &NormalForm, side: Side) -> Self {
        Self {
            key: drop_trailing(&g.syllables, side),
            side,
        }
    }

    pub fn representative(&self) -> NormalForm {
        NormalForm::from_syllables(&self.key)
    }
}

impl Edge {
    pub fn base() -> Self {
        Self { key: Vec::new() }
    }

    pub fn of(g: &NormalForm) -> Self {
        Self {
            key: g.syllables.clone(),
        }
    }

    pub fn representative(&self) -> NormalForm {
        NormalForm::from_syllables(&self.key)
    }

    pub fn endpoint(&self, side: Side) -> Vertex {
        Vertex {
            key: drop_trailing(&self.key, side),
            side,
        }
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.endpoint(Side::One), self.endpoint(Side::Two))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}[{}]", self.side.number(), word(&self.key))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{}]", word(&self.key))
    }
}

impl Serialize for Vertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Canonical key of the coset of `g` of the requested kind.
pub fn coset_key(g: &NormalForm, kind: CellKind) -> Cell {
    match kind {
        CellKind::Vertex(side) => Cell::Vertex(Vertex::of(g, side)),
        CellKind::Edge => Cell::Edge(Edge::of(g)),
    }
}

/// A non-backtracking edge path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreePath {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl TreePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Vertex {
        &self.vertices[self.vertices.len() - 1]
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vertices[0])?;
        for (e, v) in self.edges.iter().zip(&self.vertices[1..]) {
            write!(f, " -{e}- {v}")?;
        }
        Ok(())
    }
}

pub fn act_vertex(spec: &AmalgamSpec, g: &NormalForm, v: &Vertex) -> Vertex {
    Vertex::of(&spec.multiply(g, &v.representative()), v.side)
}

pub fn act_edge(spec: &AmalgamSpec, g: &NormalForm, e: &Edge) -> Edge {
    Edge::of(&spec.multiply(g, &e.representative()))
}

pub fn act(spec: &AmalgamSpec, g: &NormalForm, cell: &Cell) -> Cell {
    match cell {
        Cell::Vertex(v) => Cell::Vertex(act_vertex(spec, g, v)),
        Cell::Edge(e) => Cell::Edge(act_edge(spec, g, e)),
    }
}

pub fn act_path(spec: &AmalgamSpec, g: &NormalForm, path: &TreePath) -> TreePath {
    TreePath {
        vertices: path.vertices.iter().map(|v| act_vertex(spec, g, v)).collect(),
        edges: path.edges.iter().map(|e| act_edge(spec, g, e)).collect(),
    }
}

/// Edges at `v` paired with their far endpoints, in transversal order.
pub fn neighbors(spec: &AmalgamSpec, v: &Vertex) -> Vec<(Edge, Vertex)> {
    let far = v.side.other();
    spec.factor(v.side)
        .transversal
        .iter()
        .map(|&t| {
            let mut key = v.key.clone();
            if t != 0 {
                key.push(Syllable { side: v.side, rep: t });
            }
            let edge = Edge { key };
            let w = edge.endpoint(far);
            (edge, w)
        })
        .collect()
}

// Path from the base vertex on `start` to `target`, read off the prefixes of
// the target key.
fn rooted_path(start: Side, target: &Vertex) -> TreePath {
    let w = &target.key;
    let mut vertices = vec![Vertex::base(start)];
    let mut edges = Vec::new();
    let first_side = w.first().map_or(target.side, |s| s.side);
    if first_side != start {
        edges.push(Edge::base());
        vertices.push(Vertex::base(start.other()));
    }
    for k in 1..=w.len() {
        edges.push(Edge { key: w[..k].to_vec() });
        let side = w.get(k).map_or(target.side, |s| s.side);
        vertices.push(Vertex {
            key: w[..k].to_vec(),
            side,
        });
    }
    TreePath { vertices, edges }
}

/// The unique geodesic from `u` to `v`.
pub fn geodesic_path(spec: &AmalgamSpec, u: &Vertex, v: &Vertex) -> TreePath {
    let r = u.representative();
    let moved = act_vertex(spec, &spec.inverse(&r), v);
    act_path(spec, &r, &rooted_path(u.side, &moved))
}

pub fn distance(spec: &AmalgamSpec, u: &Vertex, v: &Vertex) -> usize {
    let moved = act_vertex(spec, &spec.inverse(&u.representative()), v);
    let first_side = moved.key.first().map_or(moved.side, |s| s.side);
    moved.key.len() + usize::from(first_side != u.side)
}

/// `{ w x w^-1 : x in G_side }` for the vertex `w * G_side`.
pub fn vertex_stabilizer(spec: &AmalgamSpec, v: &Vertex) -> Vec<NormalForm> {
    let r = v.representative();
    (0..spec.group(v.side).order())
        .map(|x| spec.conjugate(&spec.from_factor(v.side, x), &r))
        .collect()
}

/// `{ w h w^-1 : h in H }` for the edge `w * H`.
pub fn edge_stabilizer(spec: &AmalgamSpec, e: &Edge) -> Vec<NormalForm> {
    let r = e.representative();
    (0..spec.h_order())
        .map(|h| spec.conjugate(&spec.from_h(h), &r))
        .collect()
}

pub fn local_stabilizer(spec: &AmalgamSpec, cell: &Cell) -> Vec<NormalForm> {
    match cell {
        Cell::Vertex(v) => vertex_stabilizer(spec, v),
        Cell::Edge(e) => edge_stabilizer(spec, e),
    }
}

pub fn fixes_edge(spec: &AmalgamSpec, g: &NormalForm, e: &Edge) -> bool {
    act_edge(spec, g, e) == *e
}

pub fn fixes_vertex(spec: &AmalgamSpec, g: &NormalForm, v: &Vertex) -> bool {
    act_vertex(spec, g, v) == *v
}

/// Pointwise fixer of a path; for a single-vertex path, its stabilizer.
pub fn path_stabilizer(spec: &AmalgamSpec, path: &TreePath) -> Vec<NormalForm> {
    match path.edges.split_first() {
        None => vertex_stabilizer(spec, path.start()),
        Some((first, rest)) => edge_stabilizer(spec, first)
            .into_iter()
            .filter(|g| rest.iter().all(|e| fixes_edge(spec, g, e)))
            .collect(),
    }
}

/// `{ g : g e1 = e2 } = w2 H w1^-1`, always of size `|H|`.
pub fn transporter(spec: &AmalgamSpec, e1: &Edge, e2: &Edge) -> Vec<NormalForm> {
    let w1_inv = spec.inverse(&e1.representative());
    let w2 = e2.representative();
    (0..spec.h_order())
        .map(|h| spec.multiply(&spec.multiply(&w2, &spec.from_h(h)), &w1_inv))
        .collect()
}

/// Vertices within `radius` of the base edge, breadth-first with children in
/// transversal order.
pub fn ball(spec: &AmalgamSpec, radius: usize) -> Vec<Vertex> {
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for side in Side::BOTH {
        let v = Vertex::base(side);
        seen.insert(v.clone());
        queue.push_back((v, 0usize));
    }
    while let Some((v, d)) = queue.pop_front() {
        order.push(v.clone());
        if d == radius {
            continue;
        }
        for (_, w) in neighbors(spec, &v) {
            if seen.insert(w.clone()) {
                queue.push_back((w, d + 1));
            }
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcylindricityReport {
    pub k: usize,
    pub radius: usize,
    pub holds: bool,
    pub paths_checked: usize,
    pub max_stab_order: usize,
    pub witness: Option<TreePath>,
}

/// Checks every length-`k` path inside the ball of `radius` around the base
/// edge and records the largest pointwise stabilizer.
pub fn check_acylindrical(
    spec: &AmalgamSpec,
    k: usize,
    radius: usize,
) -> Result<AcylindricityReport, TreeError> {
    if k == 0 || k > 2 * radius {
        return Err(TreeError::InvalidPathLength { k, radius });
    }
    let vertices = ball(spec, radius);
    let inside: BTreeSet<&Vertex> = vertices.iter().collect();
    let mut report = AcylindricityReport {
        k,
        radius,
        holds: true,
        paths_checked: 0,
        max_stab_order: 0,
        witness: None,
    };
    for start in &vertices {
        let mut stack = vec![TreePath {
            vertices: vec![start.clone()],
            edges: Vec::new(),
        }];
        while let Some(path) = stack.pop() {
            if path.len() == k {
                if path.start() < path.end() {
                    report.paths_checked += 1;
                    // Stabilizers are subsets of a conjugate of H, hence finite.
                    let order = path_stabilizer(spec, &path).len();
                    if order > report.max_stab_order {
                        report.max_stab_order = order;
                        report.witness = Some(path);
                    }
                }
                continue;
            }
            let prev = path.vertices.len().checked_sub(2).map(|i| &path.vertices[i]);
            let mut next: Vec<TreePath> = neighbors(spec, path.end())
                .into_iter()
                .filter(|(_, w)| Some(w) != prev && inside.contains(w))
                .map(|(e, w)| {
                    let mut p = path.clone();
                    p.edges.push(e);
                    p.vertices.push(w);
                    p
                })
                .collect();
            next.reverse();
            stack.extend(next);
        }
    }
    // Finite means inside a conjugate of H here.
    report.holds = report.paths_checked > 0 && report.max_stab_order <= spec.h_order();
    Ok(report)
}
