//! Vertex and multigraph model shared by every construction.
//!
//! A vertex is a `(part, slot)` pair. Graphs over a single ground set (the
//! complete graph `K_u`, a cycle, a cubic graph) use parts of size one, so the
//! same [`PartialFactor`] type describes near factors (single-vertex hole) and
//! partial factors (whole-part hole).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("cycle has length {0}, cycles need at least 3 vertices")]
    ShortCycle(usize),
    #[error("cycle visits {0} twice")]
    RepeatedVertex(Vertex),
    #[error("distance {i} is not a residue modulo {t}")]
    DistanceOutOfRange { i: u32, t: u32 },
    #[error("loop at {0}")]
    Loop(Vertex),
    #[error("vertex {0} lies outside the ground set")]
    OutOfRange(Vertex),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Vertex {
    pub part: u32,
    pub slot: u32,
}

impl Vertex {
    pub const fn new(part: u32, slot: u32) -> Self {
        Vertex { part, slot }
    }

    /// Vertex of a graph whose parts have size one.
    pub const fn point(index: u32) -> Self {
        Vertex { part: index, slot: 0 }
    }
}

impl From<[u32; 2]> for Vertex {
    fn from([part, slot]: [u32; 2]) -> Self {
        Vertex { part, slot }
    }
}

impl From<Vertex> for [u32; 2] {
    fn from(v: Vertex) -> Self {
        [v.part, v.slot]
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.part, self.slot)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.part, self.slot)
    }
}

/// Unordered vertex pair, stored with the smaller endpoint first.
pub type Edge = (Vertex, Vertex);

pub fn edge(a: Vertex, b: Vertex) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    TensorComplete,
    LexicographicBlown,
    CompleteSimple,
    CompleteDoubled,
    Custom,
}

/// Multigraph on `num_parts × part_size` vertices with explicit multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    num_parts: u32,
    part_size: u32,
    kind: GraphKind,
    edges: BTreeMap<Edge, u32>,
}

impl MultiGraph {
    pub fn empty(num_parts: u32, part_size: u32, kind: GraphKind) -> Self {
        MultiGraph { num_parts, part_size, kind, edges: BTreeMap::new() }
    }

    pub fn num_parts(&self) -> u32 {
        self.num_parts
    }

    pub fn part_size(&self) -> u32 {
        self.part_size
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.part < self.num_parts && v.slot < self.part_size
    }

    pub fn vertex_count(&self) -> usize {
        (self.num_parts * self.part_size) as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.num_parts).flat_map(move |p| (0..self.part_size).map(move |s| Vertex::new(p, s)))
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex, multiplicity: u32) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::Loop(a));
        }
        for v in [a, b] {
            if !self.contains(v) {
                return Err(GraphError::OutOfRange(v));
            }
        }
        if multiplicity > 0 {
            *self.edges.entry(edge(a, b)).or_insert(0) += multiplicity;
        }
        Ok(())
    }

    pub fn multiplicity(&self, a: Vertex, b: Vertex) -> u32 {
        self.edges.get(&edge(a, b)).copied().unwrap_or(0)
    }

    /// Distinct vertex pairs with their multiplicities, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        self.edges.iter().map(|(&e, &m)| (e, m))
    }

    pub fn edge_map(&self) -> &BTreeMap<Edge, u32> {
        &self.edges
    }

    /// Size of the edge multiset (multiplicities counted).
    pub fn edge_count(&self) -> u64 {
        self.edges.values().map(|&m| m as u64).sum()
    }

    pub fn degrees(&self) -> BTreeMap<Vertex, u64> {
        let mut deg: BTreeMap<Vertex, u64> = self.vertices().map(|v| (v, 0)).collect();
        for (&(a, b), &m) in &self.edges {
            *deg.entry(a).or_default() += m as u64;
            *deg.entry(b).or_default() += m as u64;
        }
        deg
    }

    /// Multiset difference `self − other`; `None` if `other` is not contained in `self`.
    pub fn subtract(&self, other: &MultiGraph) -> Option<MultiGraph> {
        let mut out = self.clone();
        for (e, m) in other.edges() {
            let slot = out.edges.get_mut(&e)?;
            if *slot < m {
                return None;
            }
            *slot -= m;
            if *slot == 0 {
                out.edges.remove(&e);
            }
        }
        Some(out)
    }

    pub fn same_edges(&self, other: &MultiGraph) -> bool {
        self.edges == other.edges
    }
}

fn check_count(name: &str, value: u32, min: u32) -> Result<(), GraphError> {
    if value < min {
        Err(GraphError::Domain(format!("{name} = {value} must be at least {min}")))
    } else {
        Ok(())
    }
}

/// `(K_u × K_g)(λ)`: `(p1,s1) ~ (p2,s2)` iff `p1 ≠ p2` and `s1 ≠ s2`.
pub fn tensor_complete(u: u32, g: u32, lambda: u32) -> Result<MultiGraph, GraphError> {
    check_count("u", u, 2)?;
    check_count("g", g, 2)?;
    check_count("lambda", lambda, 1)?;
    let mut graph = MultiGraph::empty(u, g, GraphKind::TensorComplete);
    for p1 in 0..u {
        for p2 in p1 + 1..u {
            for s1 in 0..g {
                for s2 in 0..g {
                    if s1 != s2 {
                        graph.add_edge(Vertex::new(p1, s1), Vertex::new(p2, s2), lambda)?;
                    }
                }
            }
        }
    }
    Ok(graph)
}

/// `(K_u ⊗ K̄_g)(λ)`, the complete `u`-partite multigraph with parts of size `g`.
pub fn complete_multipartite(u: u32, g: u32, lambda: u32) -> Result<MultiGraph, GraphError> {
    check_count("u", u, 2)?;
    check_count("g", g, 1)?;
    check_count("lambda", lambda, 1)?;
    let mut graph = MultiGraph::empty(u, g, GraphKind::LexicographicBlown);
    for p1 in 0..u {
        for p2 in p1 + 1..u {
            for s1 in 0..g {
                for s2 in 0..g {
                    graph.add_edge(Vertex::new(p1, s1), Vertex::new(p2, s2), lambda)?;
                }
            }
        }
    }
    Ok(graph)
}

/// `K_n(λ)` on the points `(i, 0)`.
pub fn complete(n: u32, lambda: u32) -> Result<MultiGraph, GraphError> {
    check_count("n", n, 1)?;
    check_count("lambda", lambda, 1)?;
    let kind = match lambda {
        1 => GraphKind::CompleteSimple,
        2 => GraphKind::CompleteDoubled,
        _ => GraphKind::Custom,
    };
    let mut graph = MultiGraph::empty(n, 1, kind);
    for a in 0..n {
        for b in a + 1..n {
            graph.add_edge(Vertex::point(a), Vertex::point(b), lambda)?;
        }
    }
    Ok(graph)
}

/// Simple graph on points `0..n` from an edge list.
pub fn point_graph(n: u32, pairs: &[(u32, u32)]) -> Result<MultiGraph, GraphError> {
    let mut graph = MultiGraph::empty(n, 1, GraphKind::Custom);
    for &(a, b) in pairs {
        graph.add_edge(Vertex::point(a), Vertex::point(b), 1)?;
    }
    Ok(graph)
}

pub fn cycle_graph(n: u32) -> Result<MultiGraph, GraphError> {
    check_count("n", n, 3)?;
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    point_graph(n, &pairs)
}

/// Tensor product of two point graphs: parts index `left`, slots index `right`.
pub fn tensor(left: &MultiGraph, right: &MultiGraph) -> MultiGraph {
    let mut graph = MultiGraph::empty(left.vertex_count() as u32, right.vertex_count() as u32, GraphKind::Custom);
    let index = |g: &MultiGraph, v: Vertex| v.part * g.part_size() + v.slot;
    for ((a, b), m1) in left.edges() {
        let (pa, pb) = (index(left, a), index(left, b));
        for ((c, d), m2) in right.edges() {
            let (sc, sd) = (index(right, c), index(right, d));
            graph.add_edge(Vertex::new(pa, sc), Vertex::new(pb, sd), m1 * m2).expect("distinct parts");
            graph.add_edge(Vertex::new(pa, sd), Vertex::new(pb, sc), m1 * m2).expect("distinct parts");
        }
    }
    graph
}

/// Lexicographic product `G ⊗ K̄_s` of a point graph: each point becomes a part of size `s`.
pub fn lexicographic_empty(base: &MultiGraph, s: u32) -> MultiGraph {
    let mut graph = MultiGraph::empty(base.vertex_count() as u32, s, GraphKind::LexicographicBlown);
    let index = |v: Vertex| v.part * base.part_size() + v.slot;
    for ((a, b), m) in base.edges() {
        for i in 0..s {
            for j in 0..s {
                graph.add_edge(Vertex::new(index(a), i), Vertex::new(index(b), j), m).expect("distinct parts");
            }
        }
    }
    graph
}

/// Whether `(K_u ⊗ K̄_g)(λ)` minus `g` slot-aligned copies of `K_u(λ)` is `(K_u × K_g)(λ)`.
pub fn mcf_identity_check(u: u32, g: u32, lambda: u32) -> bool {
    let (Ok(multipartite), Ok(target)) = (complete_multipartite(u, g, lambda), tensor_complete(u, g, lambda)) else {
        return false;
    };
    let mut copies = MultiGraph::empty(u, g, GraphKind::Custom);
    for s in 0..g {
        for p1 in 0..u {
            for p2 in p1 + 1..u {
                copies.add_edge(Vertex::new(p1, s), Vertex::new(p2, s), lambda).expect("valid copy edge");
            }
        }
    }
    multipartite.subtract(&copies).is_some_and(|rest| rest.same_edges(&target))
}

/// Cycle stored in canonical form: least vertex first, then the smaller neighbour.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vertex>", into = "Vec<Vertex>")]
pub struct Cycle {
    vertices: Vec<Vertex>,
}

impl Cycle {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        if vertices.len() < 3 {
            return Err(GraphError::ShortCycle(vertices.len()));
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
        }
        let n = vertices.len();
        let start = (0..n).min_by_key(|&i| vertices[i]).unwrap_or(0);
        vertices.rotate_left(start);
        if vertices[n - 1] < vertices[1] {
            vertices[1..].reverse();
        }
        Ok(Cycle { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Consecutive pairs including the closing pair, each normalised.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| edge(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Result<Cycle, GraphError> {
        Cycle::new(self.vertices.iter().map(|&v| f(v)).collect())
    }
}

impl TryFrom<Vec<Vertex>> for Cycle {
    type Error = GraphError;

    fn try_from(vertices: Vec<Vertex>) -> Result<Self, Self::Error> {
        Cycle::new(vertices)
    }
}

impl From<Cycle> for Vec<Vertex> {
    fn from(c: Cycle) -> Self {
        c.vertices
    }
}

/// Vertex-disjoint cycles of one length covering everything outside `hole`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialFactor {
    pub hole: Option<u32>,
    pub cycle_length: usize,
    pub cycles: Vec<Cycle>,
}

impl PartialFactor {
    pub fn new(hole: Option<u32>, cycle_length: usize, mut cycles: Vec<Cycle>) -> Self {
        cycles.sort();
        PartialFactor { hole, cycle_length, cycles }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.cycles.iter().flat_map(|c| c.vertices().iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.cycles.iter().flat_map(|c| c.edges())
    }

    pub fn edge_count(&self) -> usize {
        self.cycles.iter().map(Cycle::len).sum()
    }

    /// Vertex-disjoint union; the hole of `self` is kept.
    pub fn merged(mut self, other: PartialFactor) -> Self {
        self.cycles.extend(other.cycles);
        self.cycles.sort();
        self
    }
}

/// Vertex-disjoint edges covering everything outside `hole`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    pub hole: Option<u32>,
    pub edges: Vec<Edge>,
}

impl Matching {
    pub fn new(hole: Option<u32>, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().map(|(a, b)| edge(a, b)).collect();
        edges.sort();
        Matching { hole, edges }
    }
}

/// The graph a decomposition claims to partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Host {
    /// `(K_u × K_g)(λ)`.
    Tensor {
        u: u32,
        g: u32,
        lambda: u32,
    },
    Graph(MultiGraph),
}

impl Host {
    pub fn materialize(&self) -> Result<MultiGraph, GraphError> {
        match self {
            Host::Tensor { u, g, lambda } => tensor_complete(*u, *g, *lambda),
            Host::Graph(graph) => Ok(graph.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub host: Host,
    pub factors: Vec<PartialFactor>,
    /// One tag per factor naming the construction that produced it.
    pub provenance: Vec<String>,
}

impl Decomposition {
    pub fn new(host: Host, factors: Vec<PartialFactor>, tag: &str) -> Self {
        let provenance = vec![tag.to_string(); factors.len()];
        Decomposition { host, factors, provenance }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiset union of all factor edges as a graph on the host's ground set.
    pub fn edge_multiset(&self, num_parts: u32, part_size: u32) -> Result<MultiGraph, GraphError> {
        let mut graph = MultiGraph::empty(num_parts, part_size, GraphKind::Custom);
        for factor in &self.factors {
            for (a, b) in factor.edges() {
                graph.add_edge(a, b, 1)?;
            }
        }
        Ok(graph)
    }
}

/// Distances `d_0..d_{r-1}`; `d_j` is the matching distance from the `j`-th part of a
/// part cycle to the next one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistanceVector(pub Vec<u32>);

impl DistanceVector {
    pub fn sum_mod(&self, t: u32) -> u32 {
        (self.0.iter().map(|&d| d as u64).sum::<u64>() % t as u64) as u32
    }
}

/// `F_i(A,B) = {a_j b_{j+i}}`, as ordered pairs `(a_j, b_{j+i})`.
pub fn distance_one_factor(part_a: u32, part_b: u32, i: u32, t: u32) -> Result<Vec<Edge>, GraphError> {
    if i >= t {
        return Err(GraphError::DistanceOutOfRange { i, t });
    }
    if part_a == part_b {
        return Err(GraphError::Domain(format!("F_i needs two distinct parts, got {part_a} twice")));
    }
    Ok((0..t).map(|j| (Vertex::new(part_a, j), Vertex::new(part_b, (j + i) % t))).collect())
}

/// Follows the distance jumps around a cycle of `r` positions on `Z_t`; returns the
/// traced cycles as `(position, slot)` sequences.
pub(crate) fn trace_distances(dv: &[u32], t: u32) -> Vec<Vec<(usize, u32)>> {
    let r = dv.len();
    let mut seen = vec![false; t as usize];
    let mut cycles = Vec::new();
    for start in 0..t {
        if seen[start as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut slot = start;
        loop {
            for (pos, &d) in dv.iter().enumerate() {
                if pos == 0 {
                    seen[slot as usize] = true;
                }
                cycle.push((pos, slot));
                slot = (slot + d) % t;
            }
            if slot == start {
                break;
            }
        }
        debug_assert_eq!(cycle.len() % r, 0);
        cycles.push(cycle);
    }
    cycles
}

/// Union of the distance factors `F_{d_j}(A_{c_j}, A_{c_{j+1}})` around `part_cycle`.
pub fn assemble_from_distances(part_cycle: &[u32], dv: &DistanceVector, t: u32) -> Result<PartialFactor, GraphError> {
    if part_cycle.len() != dv.0.len() {
        return Err(GraphError::Domain(format!(
            "distance vector has {} entries for a part cycle of length {}",
            dv.0.len(),
            part_cycle.len()
        )));
    }
    if part_cycle.len() < 2 {
        return Err(GraphError::Domain("a part cycle needs at least two parts".into()));
    }
    let distinct: BTreeSet<_> = part_cycle.iter().collect();
    if distinct.len() != part_cycle.len() {
        return Err(GraphError::Domain("part cycle repeats a part".into()));
    }
    if let Some(&i) = dv.0.iter().find(|&&d| d >= t) {
        return Err(GraphError::DistanceOutOfRange { i, t });
    }
    let mut cycles = Vec::new();
    let mut length = 0;
    for traced in trace_distances(&dv.0, t) {
        length = traced.len();
        let vertices = traced.into_iter().map(|(pos, slot)| Vertex::new(part_cycle[pos], slot)).collect();
        cycles.push(Cycle::new(vertices)?);
    }
    Ok(PartialFactor::new(None, length, cycles))
}

/// `(cycle union of factor) ⊗ K̄_s`: vertex `(p, a)` becomes `(p, a·s + i)` for `i < s`.
pub fn blow_up(factor: &PartialFactor, s: u32) -> Result<MultiGraph, GraphError> {
    check_count("s", s, 1)?;
    let num_parts = factor.vertices().map(|v| v.part + 1).max().unwrap_or(0);
    let part_size = factor.vertices().map(|v| v.slot + 1).max().unwrap_or(0) * s;
    let mut graph = MultiGraph::empty(num_parts, part_size, GraphKind::LexicographicBlown);
    for (a, b) in factor.edges() {
        for i in 0..s {
            for j in 0..s {
                graph.add_edge(Vertex::new(a.part, a.slot * s + i), Vertex::new(b.part, b.slot * s + j), 1)?;
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(p: u32, s: u32) -> Vertex {
        Vertex::new(p, s)
    }

    #[test]
    fn tensor_complete_small_cases() {
        let g = tensor_complete(3, 2, 1).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(tensor_complete(5, 2, 2).unwrap().edge_count(), 40);
        let g = tensor_complete(2, 2, 1).unwrap();
        assert_eq!(g.vertex_count(), 4);
        let pairs: Vec<_> = g.edges().map(|(e, _)| e).collect();
        assert_eq!(pairs, vec![(v(0, 0), v(1, 1)), (v(0, 1), v(1, 0))]);
    }

    #[test]
    fn tensor_complete_rejects_bad_domain() {
        assert!(tensor_complete(1, 3, 1).is_err());
        assert!(tensor_complete(3, 1, 1).is_err());
        assert!(tensor_complete(3, 3, 0).is_err());
    }

    #[test]
    fn mcf_identity_examples() {
        assert!(mcf_identity_check(3, 2, 1));
        assert!(mcf_identity_check(4, 3, 2));
        assert!(mcf_identity_check(2, 2, 1));
    }

    #[test]
    fn mcf_identity_sweep() {
        for u in 2..=8 {
            for g in 2..=6 {
                for lambda in 1..=2 {
                    assert!(mcf_identity_check(u, g, lambda), "u={u} g={g} λ={lambda}");
                }
            }
        }
    }

    #[test]
    fn distance_factor_examples() {
        assert_eq!(
            distance_one_factor(0, 1, 0, 3).unwrap(),
            vec![(v(0, 0), v(1, 0)), (v(0, 1), v(1, 1)), (v(0, 2), v(1, 2))]
        );
        assert_eq!(
            distance_one_factor(0, 1, 1, 3).unwrap(),
            vec![(v(0, 0), v(1, 1)), (v(0, 1), v(1, 2)), (v(0, 2), v(1, 0))]
        );
        let all: BTreeSet<_> = (0..3).flat_map(|i| distance_one_factor(0, 1, i, 3).unwrap()).collect();
        assert_eq!(all.len(), 9);
        assert!(distance_one_factor(0, 1, 3, 3).is_err());
        assert!(distance_one_factor(1, 1, 0, 3).is_err());
    }

    #[test]
    fn assemble_examples() {
        let f = assemble_from_distances(&[0, 1, 2, 3], &DistanceVector(vec![1, 2, 1, 2]), 3).unwrap();
        assert_eq!(f.cycles.len(), 3);
        assert!(f.cycles.iter().all(|c| c.len() == 4));
        let f = assemble_from_distances(&[0, 1, 2, 3], &DistanceVector(vec![1, 1, 1, 1]), 3).unwrap();
        assert_eq!(f.cycles.len(), 1);
        assert_eq!(f.cycles[0].len(), 12);
        assert_eq!(assemble_from_distances(&[0, 1], &DistanceVector(vec![0, 0]), 2), Err(GraphError::ShortCycle(2)));
    }

    #[test]
    fn blow_up_examples() {
        let c4 = PartialFactor::new(None, 4, vec![Cycle::new(vec![v(0, 0), v(1, 0), v(2, 0), v(3, 0)]).unwrap()]);
        let same = blow_up(&c4, 1).unwrap();
        assert_eq!(same.edge_count(), 4);
        let doubled = blow_up(&c4, 2).unwrap();
        assert_eq!(doubled.vertex_count(), 8);
        assert_eq!(doubled.edge_count(), 16);
        assert!(doubled.degrees().values().all(|&d| d == 4));

        let c3 = PartialFactor::new(None, 3, vec![Cycle::new(vec![v(0, 0), v(1, 0), v(2, 0)]).unwrap()]);
        let tripartite = blow_up(&c3, 4).unwrap();
        assert!(tripartite.same_edges(&complete_multipartite(3, 4, 1).unwrap()));
    }

    #[test]
    fn cycle_canonical_form() {
        let a = Cycle::new(vec![v(2, 0), v(0, 1), v(1, 1), v(0, 0)]).unwrap();
        let b = Cycle::new(vec![v(0, 0), v(1, 1), v(0, 1), v(2, 0)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.vertices()[0], v(0, 0));
        assert_eq!(a.vertices()[1], v(1, 1));
        assert!(Cycle::new(vec![v(0, 0), v(1, 0), v(0, 0)]).is_err());
    }

    #[test]
    fn tensor_degrees() {
        for (u, g, lambda) in [(3, 2, 1), (5, 4, 2), (4, 6, 3)] {
            let graph = tensor_complete(u, g, lambda).unwrap();
            let expected = (lambda * (u - 1) * (g - 1)) as u64;
            assert!(graph.degrees().values().all(|&d| d == expected));
            assert_eq!(graph.edge_count(), (lambda * u * (u - 1) * (g * g - g) / 2) as u64);
        }
    }

    proptest! {
        #[test]
        fn distance_factors_partition_kt(t in 1u32..12) {
            let mut seen = BTreeSet::new();
            for i in 0..t {
                for pair in distance_one_factor(0, 1, i, t).unwrap() {
                    prop_assert!(seen.insert(pair));
                }
            }
            prop_assert_eq!(seen.len() as u32, t * t);
        }

        #[test]
        fn assembled_cycle_lengths(r in 2usize..=6, t in 2u32..=7, seed in proptest::collection::vec(0u32..7, 6)) {
            let dv: Vec<u32> = seed.iter().take(r).map(|d| d % t).collect();
            let sum = dv.iter().sum::<u32>() % t;
            let gcd = num_gcd(sum, t);
            let expected = r * (t / gcd) as usize;
            let traced = trace_distances(&dv, t);
            let mut degree: BTreeMap<(usize, u32), usize> = BTreeMap::new();
            for cycle in &traced {
                prop_assert_eq!(cycle.len(), expected);
                for &x in cycle {
                    *degree.entry(x).or_default() += 1;
                }
            }
            prop_assert_eq!(degree.len(), r * t as usize);
            prop_assert!(degree.values().all(|&d| d == 1));
        }
    }

    fn num_gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            num_gcd(b, a % b)
        }
    }
}
