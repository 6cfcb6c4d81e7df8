//! Construction-agnostic checking of claimed decompositions.
//!
//! Nothing here looks at provenance tags or calls a builder: a decomposition is
//! accepted only if its cycles, spans and edge multiset are exactly right.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::arcs::{check_feasibility, Feasibility, Params};
use crate::graphs::{
    tensor_complete, Decomposition, Edge, GraphError, Host, Matching, MultiGraph, PartialFactor, Vertex,
};
use crate::search::{FactorSlot, SearchOutcome, SearchProblem};

/// What is wrong with a single factor.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum FactorViolation {
    #[error("cycle {cycle} has length {found}, expected {expected}")]
    WrongCycleLength { cycle: usize, expected: usize, found: usize },
    #[error("factor declares cycle length {found}, expected {expected}")]
    DeclaredLength { expected: usize, found: usize },
    #[error("vertex {vertex} appears in cycles {first} and {second}")]
    VertexReused { vertex: Vertex, first: usize, second: usize },
    #[error("cycle {cycle} uses {edge:?}, which is not a host edge")]
    NotAnEdge { cycle: usize, edge: Edge },
    #[error("vertex {vertex} is not covered")]
    Uncovered { vertex: Vertex },
    #[error("vertex {vertex} lies in the hole or outside the host")]
    OutsideSpan { vertex: Vertex },
    #[error("hole {hole} is not a part of the host")]
    BadHole { hole: u32 },
}

/// First failure found when checking a whole decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum Violation {
    #[error("factor {factor}: {violation}")]
    Factor { factor: usize, violation: FactorViolation },
    #[error("factor {factor} has no hole")]
    MissingHole { factor: usize },
    #[error("{edge:?} is covered {found} times, host has multiplicity {expected}")]
    OverCovered { edge: Edge, expected: u32, found: u32 },
    #[error("{edge:?} is covered {found} times, host has multiplicity {expected}")]
    UnderCovered { edge: Edge, expected: u32, found: u32 },
    #[error("{found} factors, expected {expected}")]
    FactorCount { expected: usize, found: usize },
    #[error("part {part} is the hole of {found} factors, expected {expected}")]
    HoleCount { part: u32, expected: usize, found: usize },
    #[error("host does not match the parameters")]
    HostMismatch,
    #[error("parameters do not describe a graph: {0}")]
    BadParams(String),
}

/// Checks one factor against `host`: cycle lengths, disjointness, host edges, span.
pub fn verify_partial_factor(f: &PartialFactor, host: &MultiGraph, k: usize) -> Result<(), FactorViolation> {
    if f.cycle_length != k {
        return Err(FactorViolation::DeclaredLength { expected: k, found: f.cycle_length });
    }
    if let Some(hole) = f.hole {
        if hole >= host.num_parts() {
            return Err(FactorViolation::BadHole { hole });
        }
    }
    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (ci, cycle) in f.cycles.iter().enumerate() {
        if cycle.len() != k {
            return Err(FactorViolation::WrongCycleLength { cycle: ci, expected: k, found: cycle.len() });
        }
        for &v in cycle.vertices() {
            if !host.contains(v) || Some(v.part) == f.hole {
                return Err(FactorViolation::OutsideSpan { vertex: v });
            }
            if let Some(&first) = owner.get(&v) {
                return Err(FactorViolation::VertexReused { vertex: v, first, second: ci });
            }
            owner.insert(v, ci);
        }
        for e in cycle.edges() {
            if host.multiplicity(e.0, e.1) == 0 {
                return Err(FactorViolation::NotAnEdge { cycle: ci, edge: e });
            }
        }
    }
    if let Some(vertex) = host.vertices().find(|v| Some(v.part) != f.hole && !owner.contains_key(v)) {
        return Err(FactorViolation::Uncovered { vertex });
    }
    Ok(())
}

/// Checks matchings (near or partial 1-factors) and that they partition `host`.
pub fn verify_matchings(factors: &[Matching], host: &MultiGraph) -> Result<(), Violation> {
    let mut used: BTreeMap<Edge, u32> = BTreeMap::new();
    for (i, m) in factors.iter().enumerate() {
        let fail = |violation| Violation::Factor { factor: i, violation };
        let mut seen = BTreeSet::new();
        for (ei, &(a, b)) in m.edges.iter().enumerate() {
            for v in [a, b] {
                if !host.contains(v) || Some(v.part) == m.hole {
                    return Err(fail(FactorViolation::OutsideSpan { vertex: v }));
                }
                if !seen.insert(v) {
                    return Err(fail(FactorViolation::VertexReused { vertex: v, first: ei, second: ei }));
                }
            }
            if host.multiplicity(a, b) == 0 {
                return Err(fail(FactorViolation::NotAnEdge { cycle: ei, edge: (a, b) }));
            }
            *used.entry(crate::graphs::edge(a, b)).or_default() += 1;
        }
        if let Some(vertex) = host.vertices().find(|v| Some(v.part) != m.hole && !seen.contains(v)) {
            return Err(fail(FactorViolation::Uncovered { vertex }));
        }
    }
    compare_counts(&used, host)
}

/// Exact multiset comparison between the factor edges and `host`.
fn compare_cover(factors: &[PartialFactor], host: &MultiGraph) -> Result<(), Violation> {
    let mut used: BTreeMap<Edge, u32> = BTreeMap::new();
    for f in factors {
        for e in f.edges() {
            *used.entry(e).or_default() += 1;
        }
    }
    compare_counts(&used, host)
}

fn compare_counts(used: &BTreeMap<Edge, u32>, host: &MultiGraph) -> Result<(), Violation> {
    for (&e, &found) in used {
        let expected = host.multiplicity(e.0, e.1);
        if found > expected {
            return Err(Violation::OverCovered { edge: e, expected, found });
        }
    }
    for (e, expected) in host.edges() {
        let found = used.get(&e).copied().unwrap_or(0);
        if found < expected {
            return Err(Violation::UnderCovered { edge: e, expected, found });
        }
    }
    Ok(())
}

/// Checks that `d` partitions its host into factors of cycle length `k`.
pub fn verify_decomposition(d: &Decomposition, k: usize) -> Result<(), Violation> {
    let host = d.host.materialize().map_err(|e| Violation::BadParams(e.to_string()))?;
    for (i, f) in d.factors.iter().enumerate() {
        verify_partial_factor(f, &host, k).map_err(|violation| Violation::Factor { factor: i, violation })?;
    }
    compare_cover(&d.factors, &host)
}

/// Checks that `d` is a k-ARCS of `(K_u × K_g)(λ)`.
pub fn verify_arcs(d: &Decomposition, p: &Params) -> Result<(), Violation> {
    let host = tensor_complete(p.u, p.g, p.lambda).map_err(|e: GraphError| Violation::BadParams(e.to_string()))?;
    match &d.host {
        Host::Tensor { u, g, lambda } if (*u, *g, *lambda) == (p.u, p.g, p.lambda) => {}
        Host::Graph(graph) if graph.same_edges(&host) => {}
        _ => return Err(Violation::HostMismatch),
    }
    let k = p.k as usize;
    for (i, f) in d.factors.iter().enumerate() {
        if f.hole.is_none() {
            return Err(Violation::MissingHole { factor: i });
        }
        verify_partial_factor(f, &host, k).map_err(|violation| Violation::Factor { factor: i, violation })?;
    }
    let per_hole = (p.lambda * (p.g - 1) / 2) as usize;
    let expected = per_hole * p.u as usize;
    if d.factors.len() != expected {
        return Err(Violation::FactorCount { expected, found: d.factors.len() });
    }
    compare_cover(&d.factors, &host)?;
    let mut holes: BTreeMap<u32, usize> = (0..p.u).map(|i| (i, 0)).collect();
    for f in &d.factors {
        *holes.entry(f.hole.expect("checked above")).or_default() += 1;
    }
    if let Some((&part, &found)) = holes.iter().find(|(_, &c)| c != per_hole) {
        return Err(Violation::HoleCount { part, expected: per_hole, found });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForce {
    Found(Decomposition),
    /// The parameters fail the necessary conditions; no search was run.
    Infeasible(String),
    /// No solution exists with the hole assignment used by the search.
    Exhausted,
    /// Budget ran out before a solution or exhaustion.
    Unknown,
}

/// Exhaustive search for any k-ARCS of `(K_u × K_g)(λ)` within `budget` nodes.
///
/// Factors missing part `i` are requested `λ(g−1)/2` times each; the result is
/// verified before it is returned.
pub fn brute_force_arcs(p: &Params, budget: u64) -> BruteForce {
    if let Feasibility::Infeasible(reason) = check_feasibility(p) {
        return BruteForce::Infeasible(reason.to_string());
    }
    let Ok(host) = tensor_complete(p.u, p.g, p.lambda) else {
        return BruteForce::Infeasible("graph parameters out of range".into());
    };
    let per_hole = p.lambda * (p.g - 1) / 2;
    let slots: Vec<FactorSlot> = (0..p.u)
        .flat_map(|hole| (0..per_hole).map(move |_| hole))
        .map(|hole| FactorSlot { hole: Some(hole), span: SearchProblem::span_without_part(&host, Some(hole)) })
        .collect();
    match SearchProblem::new(&host, slots, p.k as usize).solve(budget) {
        SearchOutcome::Found(factors) => {
            let d = Decomposition::new(Host::Tensor { u: p.u, g: p.g, lambda: p.lambda }, factors, "exhaustive-search");
            match verify_arcs(&d, p) {
                Ok(()) => BruteForce::Found(d),
                Err(_) => BruteForce::Unknown,
            }
        }
        SearchOutcome::Exhausted => BruteForce::Exhausted,
        SearchOutcome::BudgetExceeded => BruteForce::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{Cycle, Host};

    fn v(p: u32, s: u32) -> Vertex {
        Vertex::new(p, s)
    }

    fn params(lambda: u32, k: u32, u: u32, g: u32) -> Params {
        Params { lambda, k, u, g }
    }

    #[test]
    fn rejects_non_edge() {
        let host = tensor_complete(3, 2, 1).unwrap();
        let cycle = Cycle::new(vec![v(0, 0), v(1, 1), v(2, 0), v(1, 0)]).unwrap();
        let f = PartialFactor::new(None, 4, vec![cycle]);
        assert!(matches!(verify_partial_factor(&f, &host, 4), Err(FactorViolation::NotAnEdge { .. })));
    }

    #[test]
    fn rejects_empty_factor() {
        let host = tensor_complete(3, 2, 1).unwrap();
        let f = PartialFactor::new(Some(0), 4, vec![]);
        assert!(matches!(verify_partial_factor(&f, &host, 4), Err(FactorViolation::Uncovered { .. })));
    }

    #[test]
    fn accepts_a_hand_built_factor() {
        let host = tensor_complete(3, 3, 1).unwrap();
        let cycle = Cycle::new(vec![v(1, 0), v(2, 1), v(1, 2), v(2, 0), v(1, 1), v(2, 2)]).unwrap();
        let f = PartialFactor::new(Some(0), 6, vec![cycle]);
        assert_eq!(verify_partial_factor(&f, &host, 6), Ok(()));
        assert!(matches!(verify_partial_factor(&f, &host, 4), Err(FactorViolation::DeclaredLength { .. })));
    }

    #[test]
    fn empty_decomposition_count() {
        let d = Decomposition::new(Host::Tensor { u: 5, g: 2, lambda: 2 }, vec![], "none");
        assert_eq!(verify_arcs(&d, &params(2, 4, 5, 2)), Err(Violation::FactorCount { expected: 5, found: 0 }));
    }

    #[test]
    fn brute_force_short_circuits() {
        assert!(matches!(brute_force_arcs(&params(1, 4, 5, 4), 1000), BruteForce::Infeasible(_)));
        assert!(matches!(brute_force_arcs(&params(1, 4, 3, 2), 1000), BruteForce::Infeasible(_)));
    }

    #[test]
    fn brute_force_small_instance() {
        let p = params(2, 4, 5, 2);
        let BruteForce::Found(d) = brute_force_arcs(&p, 10_000_000) else { panic!("not found") };
        assert_eq!(verify_arcs(&d, &p), Ok(()));
        assert_eq!(d.factors.len(), 5);
    }
}
