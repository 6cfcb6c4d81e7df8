//! Feasibility, the case builders, and the dispatcher for k-ARCS of
//! `(K_u × K_g)(λ)`.
//!
//! Parts of `K_u × K_g` are the points of `K_u`; every construction here starts
//! from a structure on the points (near factors of `K_u(2)`, near-1-factors,
//! frames) and lifts it through a factorization of a product with `K_g`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks::{BlockError, BlockProvider};
use crate::compose::{
    ck_factorization_k3_times_kky_with, cycle_times_complete_blocked_with, lift_along,
    partial_ck_factorization_kplus1_times_t, partial_ckt_factorization_kplus1_times_t, ComposeError,
};
use crate::graphs::{Cycle, Decomposition, GraphError, Host, Matching, PartialFactor, Vertex};
use crate::verify::{verify_arcs, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub lambda: u32,
    pub k: u32,
    pub u: u32,
    pub g: u32,
}

impl Params {
    pub fn new(lambda: u32, k: u32, u: u32, g: u32) -> Self {
        Params { lambda, k, u, g }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ={}, k={}, u={}, g={})", self.lambda, self.k, self.u, self.g)
    }
}

/// The necessary condition a parameter set violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    CycleLength,
    Multiplicity,
    TooFewParts,
    PartTooSmall,
    OddDegree,
    Divisibility,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::CycleLength => "k must be even and at least 4",
            Condition::Multiplicity => "λ must be at least 1",
            Condition::TooFewParts => "u must be at least 3",
            Condition::PartTooSmall => "g must be at least 2",
            Condition::OddDegree => "λ(g−1) must be even",
            Condition::Divisibility => "g(u−1) must be divisible by k",
        })
    }
}

/// Parameter families left open by the existence results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpenFamily {
    /// `(λ, k, u) = (2s, 4, 4x)`.
    EvenK4U4x,
    /// `(λ, k, u) = (2s, 4t, 8)`.
    EvenU8,
    /// `(λ, k, u) = (2s, 4t, 4x+2)`.
    EvenU4x2,
    /// `(λ, k, u, g) = (2x+1, 4t, 8t+1, y)`.
    OddU2k1,
    /// `(λ, k, u, g) = (2x+1, rs, 2r+1, sy)`, `r` even, `s ≥ 3` and `y` odd.
    OddU2r1,
    /// `(u, k) = (8, 4s+2)` for even `λ`.
    HalfOddU8,
    /// `(u, k) = (4t+2, 4s+2)` for even `λ`.
    HalfOddU4t2,
    /// `(u, g, k) = (4t, 6y, 6)`, `y ≥ 2` even, for even `λ`.
    K6U4tG6y,
}

impl fmt::Display for OpenFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpenFamily::EvenK4U4x => "(2s,4,4x)",
            OpenFamily::EvenU8 => "(2s,4t,8)",
            OpenFamily::EvenU4x2 => "(2s,4t,4x+2)",
            OpenFamily::OddU2k1 => "(2x+1,4t,8t+1,y)",
            OpenFamily::OddU2r1 => "(2x+1,rs,2r+1,sy)",
            OpenFamily::HalfOddU8 => "(8,4s+2)",
            OpenFamily::HalfOddU4t2 => "(4t+2,4s+2)",
            OpenFamily::K6U4tG6y => "(4t,6y,6)",
        })
    }
}

/// A factorization `k = r·s` read as a cut of the prime factors of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplit {
    /// Prime factors of `k`, those of `r` first.
    pub primes: Vec<u32>,
    /// Number of primes in `r`.
    pub cut: usize,
    pub r: u32,
    pub s: u32,
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl PrimeSplit {
    /// The cut with `r` on the left; `None` unless `1 < r < k` divides `k`.
    pub fn new(k: u32, r: u32) -> Option<Self> {
        if r <= 1 || r >= k || k % r != 0 {
            return None;
        }
        let left = prime_factors(r);
        let cut = left.len();
        let mut primes = left;
        primes.extend(prime_factors(k / r));
        Some(PrimeSplit { primes, cut, r, s: k / r })
    }

    /// All cuts of `k`, by increasing `r`.
    pub fn all(k: u32) -> Vec<Self> {
        (2..k).filter_map(|r| PrimeSplit::new(k, r)).collect()
    }

    /// Number of primes of `k`, the `t` of `k = p_1 ⋯ p_t`.
    pub fn total(&self) -> usize {
        self.primes.len()
    }
}

/// Which construction covers a parameter set at `λ ≤ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `λ = 1`, `u = kx + 1`, `x ≠ 2`, `g` odd.
    A { x: u32 },
    /// `λ = 1`, `u = rx + 1`, `x ≠ 2`, `g ≡ s (mod 2s)`, `r ≡ 0 (mod 4)`.
    B { split: PrimeSplit, x: u32 },
    /// `λ = 2`, `u ≡ 1 (mod k)`.
    C,
    /// `λ = 2`, `u` odd, `g ≡ 0 (mod k)`.
    D,
    /// `λ = 2`, `u = 4x`, `g = ky`, `y` odd.
    E { x: u32, y: u32 },
    /// `λ = 2`, `u = 4x`, `g = ky`, `y` even, `k > 6`.
    F { x: u32, y: u32 },
    /// `λ = 2`, `r` even, `s` odd, `u ≡ 1 (mod r)`, `g ≡ 0 (mod 2s)`.
    G { split: PrimeSplit },
    /// `λ = 2`, `r` odd, `s` even, `u ≡ 1 (mod r)`, `g ≡ 0 (mod s)`.
    H { split: PrimeSplit },
    /// `λ = 2`, `r` and `s` even, `u ≡ 1 (mod r)`, `g ≡ 0 (mod s)`.
    I { split: PrimeSplit },
    /// `λ = 2`, `k ≡ 2 (mod 4)`, `r` even, `g ≡ s (mod 2s)` odd, `u ≡ 1 (mod r)`.
    OddPart { split: PrimeSplit },
}

impl Case {
    pub fn label(&self) -> &'static str {
        match self {
            Case::A { .. } => "a",
            Case::B { .. } => "b",
            Case::C => "c",
            Case::D => "d",
            Case::E { .. } => "e",
            Case::F { .. } => "f",
            Case::G { .. } => "g",
            Case::H { .. } => "h",
            Case::I { .. } => "i",
            Case::OddPart { .. } => "remark",
        }
    }

    fn split(&self) -> Option<&PrimeSplit> {
        match self {
            Case::B { split, .. }
            | Case::G { split }
            | Case::H { split }
            | Case::I { split }
            | Case::OddPart { split } => Some(split),
            _ => None,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.label())?;
        if let Some(split) = self.split() {
            write!(f, " (r={}, s={})", split.r, split.s)?;
        }
        Ok(())
    }
}

/// The `λ = 1` and `λ = 2` constructions a build combines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub single: Option<Case>,
    pub double: Option<Case>,
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.single, &self.double) {
            (Some(a), Some(b)) => write!(f, "{a} + {b}"),
            (Some(a), None) | (None, Some(a)) => write!(f, "{a}"),
            (None, None) => f.write_str("no case"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feasibility {
    Feasible(Plan),
    Infeasible(Condition),
    OpenException(OpenFamily),
    UnsupportedCase,
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feasibility::Feasible(plan) => write!(f, "Feasible ({plan})"),
            Feasibility::Infeasible(c) => write!(f, "Infeasible ({c})"),
            Feasibility::OpenException(family) => write!(f, "OpenException {family}"),
            Feasibility::UnsupportedCase => f.write_str("UnsupportedCase"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArcsError {
    #[error("infeasible: {0}")]
    Infeasible(Condition),
    #[error("open exception family {0}")]
    OpenException(OpenFamily),
    #[error("no construction covers {0}")]
    UnsupportedCase(Params),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("construction produced an invalid decomposition (factor {factor:?}): {detail}")]
    ConstructionBug { factor: Option<usize>, detail: String },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn necessary(p: &Params) -> Option<Condition> {
    if p.k < 4 || p.k % 2 == 1 {
        Some(Condition::CycleLength)
    } else if p.lambda < 1 {
        Some(Condition::Multiplicity)
    } else if p.u < 3 {
        Some(Condition::TooFewParts)
    } else if p.g < 2 {
        Some(Condition::PartTooSmall)
    } else if (p.lambda as u64 * (p.g as u64 - 1)) % 2 == 1 {
        Some(Condition::OddDegree)
    } else if (p.g as u64 * (p.u as u64 - 1)) % p.k as u64 != 0 {
        Some(Condition::Divisibility)
    } else {
        None
    }
}

fn open_family(p: &Params) -> Option<OpenFamily> {
    let Params { lambda, k, u, g } = *p;
    if k % 4 == 0 {
        if lambda % 2 == 0 {
            if u == 8 {
                return Some(OpenFamily::EvenU8);
            }
            if k == 4 && u % 4 == 0 {
                return Some(OpenFamily::EvenK4U4x);
            }
            if u % 4 == 2 {
                return Some(OpenFamily::EvenU4x2);
            }
        } else {
            if u == 2 * k + 1 {
                return Some(OpenFamily::OddU2k1);
            }
            let odd_split = PrimeSplit::all(k).into_iter().any(|sp| {
                sp.r % 2 == 0 && sp.s >= 3 && sp.s % 2 == 1 && u == 2 * sp.r + 1 && g % sp.s == 0 && (g / sp.s) % 2 == 1
            });
            if odd_split {
                return Some(OpenFamily::OddU2r1);
            }
        }
    } else if lambda % 2 == 0 {
        if u == 8 {
            return Some(OpenFamily::HalfOddU8);
        }
        if u % 4 == 2 {
            return Some(OpenFamily::HalfOddU4t2);
        }
        if k == 6 && u % 4 == 0 && g % 12 == 0 {
            return Some(OpenFamily::K6U4tG6y);
        }
    }
    None
}

/// The `λ = 1` case covering `(k, u, g)`, if any.
pub fn single_case(k: u32, u: u32, g: u32) -> Option<Case> {
    if k % 4 != 0 || g % 2 == 0 || g < 3 {
        return None;
    }
    if (u - 1) % k == 0 && (u - 1) / k != 2 {
        return Some(Case::A { x: (u - 1) / k });
    }
    PrimeSplit::all(k)
        .into_iter()
        .find(|sp| {
            sp.r % 4 == 0
                && sp.cut > 1
                && sp.s % 2 == 1
                && (u - 1) % sp.r == 0
                && (u - 1) / sp.r != 2
                && g % (2 * sp.s) == sp.s
        })
        .map(|split| Case::B { x: (u - 1) / split.r, split })
}

/// The `λ = 2` case covering `(k, u, g)`, if any, in listing order.
pub fn double_case(k: u32, u: u32, g: u32) -> Option<Case> {
    if (u - 1) % k == 0 {
        return Some(Case::C);
    }
    if u % 2 == 1 && g % k == 0 {
        return Some(Case::D);
    }
    if u % 4 == 0 && u != 8 && g % k == 0 && k >= 6 {
        let (x, y) = (u / 4, g / k);
        if y % 2 == 1 {
            return Some(Case::E { x, y });
        }
        if k > 6 {
            return Some(Case::F { x, y });
        }
    }
    let splits = PrimeSplit::all(k);
    let t = |sp: &PrimeSplit| sp.total();
    // With r = 2 the construction needs a C_k-factorization of K_g(2).
    let r_two_ok = |sp: &PrimeSplit| sp.r != 2 || g % k == 0;
    if let Some(split) = splits.iter().find(|sp| {
        sp.r % 2 == 0
            && sp.s % 2 == 1
            && (u - 1) % sp.r == 0
            && g % (2 * sp.s) == 0
            && ((sp.cut == 1 && sp.r == 2) || sp.cut + 1 < t(sp))
    }) {
        return Some(Case::G { split: split.clone() });
    }
    if k % 4 == 2 {
        if let Some(split) =
            splits.iter().find(|sp| sp.r % 2 == 0 && sp.s % 2 == 1 && (u - 1) % sp.r == 0 && g % (2 * sp.s) == sp.s)
        {
            return Some(Case::OddPart { split: split.clone() });
        }
    }
    // An odd cycle length r lifts through C_r × K_g only for g ≢ 2 (mod 4).
    if let Some(split) =
        splits.iter().find(|sp| sp.r % 2 == 1 && sp.s % 2 == 0 && (u - 1) % sp.r == 0 && g % sp.s == 0 && g % 4 != 2)
    {
        return Some(Case::H { split: split.clone() });
    }
    if k % 4 == 0 {
        if let Some(split) = splits.iter().find(|sp| {
            sp.r % 2 == 0 && sp.s % 2 == 0 && sp.cut + 1 < t(sp) && (u - 1) % sp.r == 0 && g % sp.s == 0 && r_two_ok(sp)
        }) {
            return Some(Case::I { split: split.clone() });
        }
    }
    None
}

/// Necessary conditions, open families, then the covering construction.
pub fn check_feasibility(p: &Params) -> Feasibility {
    if let Some(c) = necessary(p) {
        return Feasibility::Infeasible(c);
    }
    if let Some(family) = open_family(p) {
        return Feasibility::OpenException(family);
    }
    let single = single_case(p.k, p.u, p.g);
    let double = if p.lambda % 2 == 0 || p.lambda > 1 { double_case(p.k, p.u, p.g) } else { None };
    let plan = match p.lambda {
        1 => Plan { single, double: None },
        2 => Plan { single: None, double },
        l if l % 2 == 1 => Plan { single, double },
        _ if double.is_some() => Plan { single: None, double },
        _ => Plan { single, double: None },
    };
    let covered = match p.lambda % 2 {
        1 => plan.single.is_some(),
        _ => plan.single.is_some() || plan.double.is_some(),
    };
    if covered {
        Feasibility::Feasible(plan)
    } else {
        Feasibility::UnsupportedCase
    }
}

/// `(λu(g−1)/2, λ(g−1)/2, g(u−1))`: total factors, factors per hole, edges per factor.
pub fn expected_counts(p: &Params) -> (u64, u64, u64) {
    let (lambda, u, g) = (p.lambda as u64, p.u as u64, p.g as u64);
    (lambda * u * (g - 1) / 2, lambda * (g - 1) / 2, g * (u - 1))
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ArcsError> {
    if ok {
        Ok(())
    } else {
        Err(ArcsError::Hypothesis(msg()))
    }
}

/// Written point sequences and missing point of each near-`C_len`-factor of `K_u(2)`.
/// Missing point and written point sequences of one near factor.
type NearFactor = (u32, Vec<Vec<u32>>);

fn near_cycle_points(provider: &BlockProvider, len: u32, u: u32) -> Result<Vec<NearFactor>, ArcsError> {
    let d = provider.near_cycle_factorization_doubled(len, u)?.decomposition;
    Ok(d.factors
        .iter()
        .map(|f| {
            let hole = f.hole.expect("near factors carry their missing point");
            (hole, f.cycles.iter().map(|c| c.vertices().iter().map(|v| v.part).collect()).collect())
        })
        .collect())
}

/// Lifts every near factor of `K_u(2)` through a factorization of `C_len × K_g`.
fn lift_near_factors(near: &[NearFactor], block: &Decomposition) -> Result<Vec<PartialFactor>, ArcsError> {
    let mut out = Vec::new();
    for (hole, seqs) in near {
        out.extend(lift_along(seqs, block, Some(*hole))?);
    }
    Ok(out)
}

/// `C_n × K_2` on parts `a`, `b` along the slot cycle `xs`, `n` even: two `n`-cycles.
fn edge_times_cycle(a: u32, b: u32, xs: &[u32]) -> Result<Vec<Cycle>, GraphError> {
    let walk = |first: u32, second: u32| -> Vec<Vertex> {
        xs.iter().enumerate().map(|(j, &x)| Vertex::new(if j % 2 == 0 { first } else { second }, x)).collect()
    };
    Ok(vec![Cycle::new(walk(a, b))?, Cycle::new(walk(b, a))?])
}

fn slot_sequences(d: &Decomposition) -> Vec<Vec<Vec<u32>>> {
    d.factors.iter().map(|f| f.cycles.iter().map(|c| c.vertices().iter().map(|v| v.part).collect()).collect()).collect()
}

/// Each matching edge times each cycle of one slot factor.
fn matching_times(m: &Matching, slot_factor: &[Vec<u32>], len: usize) -> Result<PartialFactor, ArcsError> {
    let mut cycles = Vec::new();
    for &(a, b) in &m.edges {
        for xs in slot_factor {
            cycles.extend(edge_times_cycle(a.part, b.part, xs)?);
        }
    }
    Ok(PartialFactor::new(m.hole, len, cycles))
}

fn tensor_host(p: &Params, lambda: u32) -> Host {
    Host::Tensor { u: p.u, g: p.g, lambda }
}

/// Case c: near-`C_k`-factors of `K_u(2)`, each cycle times `K_g` split into `C_k`-factors.
pub fn build_case_u1modk_l2(p: &Params) -> Result<Decomposition, ArcsError> {
    build_case_u1modk_l2_with(BlockProvider::global(), p)
}

fn build_case_u1modk_l2_with(provider: &BlockProvider, p: &Params) -> Result<Decomposition, ArcsError> {
    require(p.lambda == 2 && p.k >= 4 && p.k % 2 == 0 && p.u > p.k && (p.u - 1) % p.k == 0 && p.g >= 2, || {
        format!("{p} needs λ = 2, u ≡ 1 (mod k), g ≥ 2")
    })?;
    let near = near_cycle_points(provider, p.k, p.u)?;
    let block = provider.cycle_times_complete(p.k, p.g, 1)?.decomposition;
    Ok(Decomposition::new(tensor_host(p, 2), lift_near_factors(&near, &block)?, "case c"))
}

/// Near-1-factors of `K_u` times a cycle factorization of the slots.
fn near_one_times(
    provider: &BlockProvider,
    p: &Params,
    slot_factors: &Decomposition,
    len: usize,
    tag: &str,
) -> Result<Decomposition, ArcsError> {
    let near = provider.near_one_factorization(p.u)?;
    let slots = slot_sequences(slot_factors);
    let mut factors = Vec::new();
    for m in &near {
        for sf in &slots {
            factors.push(matching_times(m, sf, len)?);
        }
    }
    Ok(Decomposition::new(tensor_host(p, 2), factors, tag))
}

/// Pairs `{α, β}` of nonzero slot differences, each difference in exactly two
/// pairs and every `α − β` of order `s` in `Z_g`: `{α, α + g/s}` and `{g/s, −g/s}`.
fn difference_pairs(g: u32, s: u32) -> Vec<(u32, u32)> {
    let m = g / s;
    let mut pairs: Vec<(u32, u32)> = (1..g).filter(|&a| (a + m) % g != 0).map(|a| (a, (a + m) % g)).collect();
    pairs.push((m, g - m));
    pairs
}

/// `2s`-cycles on parts `a`, `b` using the `a → b` differences `α` and `β`.
fn pair_cycles(a: u32, b: u32, (alpha, beta): (u32, u32), g: u32, s: u32) -> Result<Vec<Cycle>, GraphError> {
    (0..g / s)
        .map(|x| {
            let mut walk = Vec::with_capacity(2 * s as usize);
            let mut at = x;
            for _ in 0..s {
                walk.push(Vertex::new(a, at));
                at = (at + alpha) % g;
                walk.push(Vertex::new(b, at));
                at = (at + g - beta) % g;
            }
            Cycle::new(walk)
        })
        .collect()
}

/// Odd-part case with `r = 2`: each near-1-factor of `K_u` times each of the
/// `g − 1` difference pairs, which together cover `(K_2 × K_g)(2)` on every edge.
fn near_one_times_pairs(provider: &BlockProvider, p: &Params, s: u32) -> Result<Decomposition, ArcsError> {
    require(s >= 3 && s % 2 == 1 && p.g % s == 0, || format!("{p}: s = {s} must be odd, at least 3, and divide g"))?;
    let near = provider.near_one_factorization(p.u)?;
    let pairs = difference_pairs(p.g, s);
    let mut factors = Vec::new();
    for m in &near {
        for &pair in &pairs {
            let mut cycles = Vec::new();
            for &(a, b) in &m.edges {
                cycles.extend(pair_cycles(a.part, b.part, pair, p.g, s)?);
            }
            factors.push(PartialFactor::new(m.hole, 2 * s as usize, cycles));
        }
    }
    Ok(Decomposition::new(tensor_host(p, 2), factors, "case remark"))
}

/// Case d: near-1-factors of `K_u` times a `C_k`-factorization of `K_g(2)`.
pub fn build_case_uodd_g0modk_l2(p: &Params) -> Result<Decomposition, ArcsError> {
    build_case_uodd_g0modk_l2_with(BlockProvider::global(), p, "case d")
}

fn build_case_uodd_g0modk_l2_with(provider: &BlockProvider, p: &Params, tag: &str) -> Result<Decomposition, ArcsError> {
    require(p.lambda == 2 && p.u >= 3 && p.u % 2 == 1 && p.g % p.k == 0, || {
        format!("{p} needs λ = 2, odd u, g ≡ 0 (mod k)")
    })?;
    let slot_factors = provider.cycle_factorization_complete_doubled(p.k, p.g)?.decomposition;
    near_one_times(provider, p, &slot_factors, p.k as usize, tag)
}

/// Cases e and f: `u = 4x`, `g = ky`.
///
/// `K_{4x}` is split into `K_x ⊗ K̄_4` and `x` copies of `K_4`. The `j`-th
/// matching missing group `i` times the `l`-th `C_k`-factor of `K_g(2)` is joined
/// with the `l`-th factor of (triangle `j` of group `i`) `× K_g`.
pub fn build_case_u4x(p: &Params) -> Result<Decomposition, ArcsError> {
    build_case_u4x_with(BlockProvider::global(), p)
}

fn build_case_u4x_with(provider: &BlockProvider, p: &Params) -> Result<Decomposition, ArcsError> {
    let (k, u, g) = (p.k, p.u, p.g);
    require(p.lambda == 2 && u % 4 == 0 && u != 8 && g % k == 0 && k >= 6, || {
        format!("{p} needs λ = 2, u = 4x with x ≠ 2, g ≡ 0 (mod k), k ≥ 6")
    })?;
    let (x, y) = (u / 4, g / k);
    let triangles = near_cycle_points(provider, 3, 4)?;
    let block = ck_factorization_k3_times_kky_with(provider, k, y)?;
    let tag = if y % 2 == 1 { "case e" } else { "case f" };
    let group = |i: u32, seqs: &[Vec<u32>]| -> Vec<Vec<u32>> {
        seqs.iter().map(|s| s.iter().map(|&c| 4 * i + c).collect()).collect()
    };
    if x == 1 {
        return Ok(Decomposition::new(tensor_host(p, 2), lift_near_factors(&triangles, &block)?, tag));
    }
    let matchings = provider.partial_one_factorization_multipartite(x, 4)?;
    let slots = slot_sequences(&provider.cycle_factorization_complete_doubled(k, g)?.decomposition);
    let mut factors = Vec::new();
    for i in 0..x {
        let own: Vec<Matching> = matchings
            .iter()
            .filter(|m| m.hole == Some(i))
            .map(|m| Matching::new(None, m.edges.iter().map(|&(a, b)| (point_of(a, 4), point_of(b, 4)))))
            .collect();
        for (j, (hole, seqs)) in triangles.iter().enumerate() {
            let lifted = lift_along(&group(i, seqs), &block, Some(4 * i + hole))?;
            for (l, f) in lifted.into_iter().enumerate() {
                let outside = matching_times(&own[j], &slots[l], k as usize)?;
                factors.push(f.merged(outside));
            }
        }
    }
    Ok(Decomposition::new(tensor_host(p, 2), factors, tag))
}

/// Vertex `(group, c)` of `K_x ⊗ K̄_size` as a point of `K_{x·size}`.
fn point_of(v: Vertex, size: u32) -> Vertex {
    Vertex::point(v.part * size + v.slot)
}

/// `C_{rs}`-factorization of `C_r × K_g`: directly, else through slot blocks of
/// every size `t` with `s | t | g`.
fn cycle_times_any(provider: &BlockProvider, r: u32, g: u32, s: u32) -> Result<Decomposition, ArcsError> {
    let direct = match provider.cycle_times_complete(r, g, s) {
        Ok(found) => return Ok(found.decomposition),
        Err(e) => e,
    };
    for t in (s..g).step_by(s as usize).filter(|t| g % t == 0) {
        if let Ok(d) = cycle_times_complete_blocked_with(provider, r, t, g / t, s) {
            return Ok(d);
        }
    }
    Err(direct.into())
}

/// Cases g, h, i and the odd-part case with `λ = 2`.
pub fn build_case_primesplit_l2(p: &Params, split: &PrimeSplit) -> Result<Decomposition, ArcsError> {
    build_case_primesplit_l2_with(BlockProvider::global(), p, split)
}

fn build_case_primesplit_l2_with(
    provider: &BlockProvider,
    p: &Params,
    split: &PrimeSplit,
) -> Result<Decomposition, ArcsError> {
    let (r, s, u, g) = (split.r, split.s, p.u, p.g);
    require(p.lambda == 2 && r * s == p.k && (u - 1) % r == 0, || format!("{p} needs λ = 2, k = rs, u ≡ 1 (mod {r})"))?;
    let odd_part = s % 2 == 1 && g % (2 * s) == s;
    if r == 2 {
        if odd_part {
            return near_one_times_pairs(provider, p, s);
        }
        require(g % p.k == 0, || format!("{p} with r = 2 needs g ≡ 0 (mod k)"))?;
        return build_case_uodd_g0modk_l2_with(provider, p, "case g");
    }
    let near = near_cycle_points(provider, r, u)?;
    let (block, tag) = if r % 2 == 1 {
        require(s % 2 == 0 && g % s == 0 && g % 4 != 2, || {
            format!("{p}: odd r = {r} needs g ≡ 0 (mod {s}), g ≢ 2 (mod 4)")
        })?;
        (cycle_times_any(provider, r, g, s)?, "case h")
    } else if s % 2 == 1 {
        require(g % (2 * s) == 0 || odd_part, || format!("{p}: g must be ≡ 0 or {s} (mod {})", 2 * s))?;
        let tag = if odd_part { "case remark" } else { "case g" };
        (cycle_times_any(provider, r, g, s)?, tag)
    } else {
        require(g % s == 0, || format!("{p}: g must be ≡ 0 (mod {s})"))?;
        (cycle_times_complete_blocked_with(provider, r, s, g / s, s)?, "case i")
    };
    Ok(Decomposition::new(tensor_host(p, 2), lift_near_factors(&near, &block)?, tag))
}

/// Which partial factorization of `K_{r+1} × K_n` a frame is filled with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fill {
    /// Cycle length `r`.
    Short,
    /// Cycle length `rn`.
    Long,
}

/// Partial factorization of `K_{rx+1} × K_n` (`λ = 1`, `r ≡ 0 (mod 4)`, `n`
/// odd) with cycle length `r` or `rn`.
///
/// `x = 1` is the `K_{r+1}` construction itself. For `x ≥ 3`, `K_{rx+1}` is the
/// frame `K_x ⊗ K̄_r` plus `x` copies `Γ_i` of `K_{r+1}` sharing `∞`. The frame's
/// partial 1-factors of `K_x ⊗ K̄_2`, blown up by `K̄_{r/2}`, give `C_r`-factors
/// `G'` avoiding group `i` and `∞`; their products with `K_n` are paired one to
/// one with the factors of `Γ_i × K_n` that miss a point of group `i`. The factors
/// of each `Γ_i × K_n` missing `∞` are joined across all `i`.
fn kx1_times(provider: &BlockProvider, r: u32, x: u32, n: u32, fill: Fill) -> Result<Vec<PartialFactor>, ArcsError> {
    let kp = match fill {
        Fill::Short => partial_ck_factorization_kplus1_times_t(r, n)?,
        Fill::Long => partial_ckt_factorization_kplus1_times_t(r, n)?,
    };
    if x == 1 {
        return Ok(kp.factors);
    }
    require(x >= 3, || format!("x = {x} must be 1 or at least 3"))?;
    let inf = r * x;
    let len = kp.factors[0].cycle_length;
    let half = r / 2;
    let delta = provider.partial_one_factorization_multipartite(x, 2)?;
    let bip = provider.ck_factorization_bipartite(half, half, r)?.decomposition;
    let product = match fill {
        Fill::Short => provider.cycle_times_complete(r, n, 1)?.decomposition,
        Fill::Long => provider.cycle_times_complete(r, n, n)?.decomposition,
    };
    let to_group = |i: u32, v: Vertex| -> Vertex {
        let part = if v.part == r { inf } else { i * r + v.part };
        Vertex::new(part, v.slot)
    };
    let mut factors = Vec::new();
    let mut rim: Vec<PartialFactor> = Vec::new();
    for i in 0..x {
        let mut outside = Vec::new();
        for m in delta.iter().filter(|m| m.hole == Some(i)) {
            for bf in &bip.factors {
                let mut seqs = Vec::new();
                for &(a, b) in &m.edges {
                    for c in &bf.cycles {
                        let point = |v: Vertex| {
                            let end = if v.part == 0 { a } else { b };
                            end.part * r + end.slot * half + v.slot
                        };
                        seqs.push(c.vertices().iter().map(|&v| point(v)).collect::<Vec<u32>>());
                    }
                }
                outside.extend(lift_along(&seqs, &product, None)?);
            }
        }
        let mut inner = Vec::new();
        let mut own_rim = Vec::new();
        for f in &kp.factors {
            let cycles = f.cycles.iter().map(|c| c.map(|v| to_group(i, v))).collect::<Result<Vec<_>, _>>()?;
            let hole = f.hole.map(|h| if h == r { inf } else { i * r + h });
            let lifted = PartialFactor::new(hole, len, cycles);
            if f.hole == Some(r) {
                own_rim.push(lifted);
            } else {
                inner.push(lifted);
            }
        }
        if outside.len() != inner.len() {
            return Err(ArcsError::ConstructionBug {
                factor: None,
                detail: format!("frame pairs {} outer with {} inner factors", outside.len(), inner.len()),
            });
        }
        factors.extend(inner.into_iter().zip(outside).map(|(f, o)| f.merged(o)));
        if rim.is_empty() {
            rim = own_rim;
        } else {
            rim = rim.into_iter().zip(own_rim).map(|(a, b)| a.merged(b)).collect();
        }
    }
    factors.extend(rim);
    Ok(factors)
}

/// Case a: `λ = 1`, `k ≡ 0 (mod 4)`, `u = kx + 1` with `x ≠ 2`, `g` odd.
pub fn build_case_l1(p: &Params) -> Result<Decomposition, ArcsError> {
    build_case_l1_with(BlockProvider::global(), p)
}

fn build_case_l1_with(provider: &BlockProvider, p: &Params) -> Result<Decomposition, ArcsError> {
    let (k, u, g) = (p.k, p.u, p.g);
    require(p.lambda == 1 && k % 4 == 0 && (u - 1) % k == 0 && (u - 1) / k != 2 && g >= 3 && g % 2 == 1, || {
        format!("{p} needs λ = 1, k ≡ 0 (mod 4), u = kx + 1 with x ≠ 2, odd g ≥ 3")
    })?;
    let factors = kx1_times(provider, k, (u - 1) / k, g, Fill::Short)?;
    Ok(Decomposition::new(tensor_host(p, 1), factors, "case a"))
}

/// Case b: `λ = 1`, `k = rs`, `r ≡ 0 (mod 4)`, `u = rx + 1` with `x ≠ 2`,
/// `g = s(2y + 1)`.
///
/// `K_u × K_g` is `(K_u × K_{2y+1}) ⊗ K̄_s` plus `2y + 1` slot blocks of
/// `K_u × K_s`. Each `C_r` of a partial `C_r`-factor of `K_u × K_{2y+1}` is blown
/// up by the Hamilton factors of `C_r ⊗ K̄_s`; the blocks carry a partial
/// `C_{rs}`-factorization of `K_u × K_s`, joined across blocks.
pub fn build_case_primesplit_l1(p: &Params, split: &PrimeSplit) -> Result<Decomposition, ArcsError> {
    build_case_primesplit_l1_with(BlockProvider::global(), p, split)
}

fn build_case_primesplit_l1_with(
    provider: &BlockProvider,
    p: &Params,
    split: &PrimeSplit,
) -> Result<Decomposition, ArcsError> {
    let (r, s, u, g) = (split.r, split.s, p.u, p.g);
    require(
        p.lambda == 1
            && r * s == p.k
            && r % 4 == 0
            && s % 2 == 1
            && s >= 3
            && (u - 1) % r == 0
            && (u - 1) / r != 2
            && g % (2 * s) == s,
        || format!("{p} needs λ = 1, r ≡ 0 (mod 4), u = rx + 1 with x ≠ 2, g ≡ s (mod 2s)"),
    )?;
    let x = (u - 1) / r;
    let blocks = g / s;
    let len = p.k as usize;
    let mut factors = Vec::new();
    if blocks > 1 {
        let base = kx1_times(provider, r, x, blocks, Fill::Short)?;
        let lex = provider.hamilton_decomp_cycle_lex_empty(r, s)?.decomposition;
        for f in &base {
            for hf in &lex.factors {
                let mut cycles = Vec::new();
                for c in &f.cycles {
                    let seq = c.vertices();
                    for hc in &hf.cycles {
                        cycles.push(hc.map(|v| {
                            let at = seq[v.part as usize];
                            Vertex::new(at.part, at.slot * s + v.slot)
                        })?);
                    }
                }
                factors.push(PartialFactor::new(f.hole, len, cycles));
            }
        }
    }
    for f in kx1_times(provider, r, x, s, Fill::Long)? {
        let mut cycles = Vec::new();
        for b in 0..blocks {
            for c in &f.cycles {
                cycles.push(c.map(|v| Vertex::new(v.part, b * s + v.slot))?);
            }
        }
        factors.push(PartialFactor::new(f.hole, len, cycles));
    }
    Ok(Decomposition::new(tensor_host(p, 1), factors, "case b"))
}

fn build_case(provider: &BlockProvider, p: &Params, case: &Case) -> Result<Decomposition, ArcsError> {
    match case {
        Case::A { .. } => build_case_l1_with(provider, p),
        Case::B { split, .. } => build_case_primesplit_l1_with(provider, p, split),
        Case::C => build_case_u1modk_l2_with(provider, p),
        Case::D => build_case_uodd_g0modk_l2_with(provider, p, "case d"),
        Case::E { .. } | Case::F { .. } => build_case_u4x_with(provider, p),
        Case::G { split } | Case::H { split } | Case::I { split } | Case::OddPart { split } => {
            build_case_primesplit_l2_with(provider, p, split)
        }
    }
}

/// Options for [`build_arcs_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Verify the assembled decomposition before returning it.
    pub verify: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { verify: true }
    }
}

/// Builds and verifies a k-ARCS of `(K_u × K_g)(λ)`.
pub fn build_arcs(p: &Params) -> Result<Decomposition, ArcsError> {
    build_arcs_with(BlockProvider::global(), p, BuildOptions::default())
}

/// For `λ > 2`: even `λ` repeats the `λ = 2` solution `λ/2` times (or the
/// `λ = 1` solution `λ` times); odd `λ` adds `(λ − 1)/2` copies of the `λ = 2`
/// solution (or of the doubled `λ = 1` solution) to the `λ = 1` solution.
pub fn build_arcs_with(
    provider: &BlockProvider,
    p: &Params,
    options: BuildOptions,
) -> Result<Decomposition, ArcsError> {
    let plan = match check_feasibility(p) {
        Feasibility::Feasible(plan) => plan,
        Feasibility::Infeasible(c) => return Err(ArcsError::Infeasible(c)),
        Feasibility::OpenException(family) => return Err(ArcsError::OpenException(family)),
        Feasibility::UnsupportedCase => return Err(ArcsError::UnsupportedCase(*p)),
    };
    let base_params = |lambda| Params { lambda, ..*p };
    let single = plan.single.as_ref().map(|c| build_case(provider, &base_params(1), c)).transpose()?;
    let double = plan.double.as_ref().map(|c| build_case(provider, &base_params(2), c)).transpose()?;
    let mut parts: Vec<&Decomposition> = Vec::new();
    match (p.lambda % 2, &single, &double) {
        (1, Some(one), two) => {
            parts.push(one);
            for _ in 0..(p.lambda - 1) / 2 {
                match two {
                    Some(two) => parts.push(two),
                    None => {
                        parts.push(one);
                        parts.push(one);
                    }
                }
            }
        }
        (0, _, Some(two)) => parts.extend(std::iter::repeat_n(two, (p.lambda / 2) as usize)),
        (0, Some(one), None) => parts.extend(std::iter::repeat_n(one, p.lambda as usize)),
        _ => return Err(ArcsError::UnsupportedCase(*p)),
    }
    let mut factors = Vec::new();
    let mut provenance = Vec::new();
    for d in parts {
        factors.extend(d.factors.iter().cloned());
        provenance.extend(d.provenance.iter().cloned());
    }
    let d = Decomposition { host: Host::Tensor { u: p.u, g: p.g, lambda: p.lambda }, factors, provenance };
    if options.verify {
        verify_arcs(&d, p)
            .map_err(|v| ArcsError::ConstructionBug { factor: violating_factor(&v), detail: v.to_string() })?;
    }
    Ok(d)
}

fn violating_factor(v: &Violation) -> Option<usize> {
    match v {
        Violation::Factor { factor, .. } => Some(*factor),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: u32, k: u32, u: u32, g: u32) -> Params {
        Params { lambda, k, u, g }
    }

    #[test]
    fn necessity() {
        assert_eq!(check_feasibility(&params(1, 4, 5, 4)), Feasibility::Infeasible(Condition::OddDegree));
        assert_eq!(check_feasibility(&params(1, 4, 6, 3)), Feasibility::Infeasible(Condition::Divisibility));
        assert_eq!(check_feasibility(&params(2, 4, 2, 4)), Feasibility::Infeasible(Condition::TooFewParts));
        assert_eq!(check_feasibility(&params(2, 4, 5, 1)), Feasibility::Infeasible(Condition::PartTooSmall));
        assert_eq!(check_feasibility(&params(2, 5, 6, 2)), Feasibility::Infeasible(Condition::CycleLength));
    }

    #[test]
    fn open_families() {
        assert_eq!(check_feasibility(&params(2, 4, 8, 4)), Feasibility::OpenException(OpenFamily::EvenU8));
        assert_eq!(check_feasibility(&params(2, 4, 8, 8)), Feasibility::OpenException(OpenFamily::EvenU8));
        assert_eq!(check_feasibility(&params(2, 4, 4, 4)), Feasibility::OpenException(OpenFamily::EvenK4U4x));
        assert_eq!(check_feasibility(&params(2, 6, 6, 6)), Feasibility::OpenException(OpenFamily::HalfOddU4t2));
        assert_eq!(check_feasibility(&params(1, 4, 9, 3)), Feasibility::OpenException(OpenFamily::OddU2k1));
        assert_eq!(check_feasibility(&params(1, 12, 9, 3)), Feasibility::OpenException(OpenFamily::OddU2r1));
        assert_eq!(check_feasibility(&params(2, 6, 4, 12)), Feasibility::OpenException(OpenFamily::K6U4tG6y));
    }

    #[test]
    fn case_labels() {
        let label = |l, k, u, g| check_feasibility(&params(l, k, u, g)).to_string();
        assert_eq!(label(1, 4, 5, 3), "Feasible (case a)");
        assert_eq!(label(2, 6, 3, 6), "Feasible (case d)");
        assert_eq!(label(2, 4, 5, 2), "Feasible (case c)");
        assert_eq!(label(2, 6, 4, 6), "Feasible (case e)");
        assert_eq!(label(1, 12, 5, 3), "Feasible (case b (r=4, s=3))");
        assert_eq!(label(3, 4, 5, 3), "Feasible (case a + case c)");
        assert_eq!(label(2, 6, 4, 2), "UnsupportedCase");
        assert_eq!(label(1, 6, 7, 3), "UnsupportedCase");
    }

    #[test]
    fn counts() {
        assert_eq!(expected_counts(&params(2, 4, 5, 2)), (5, 1, 8));
        assert_eq!(expected_counts(&params(1, 4, 5, 3)), (5, 1, 12));
        assert_eq!(expected_counts(&params(2, 6, 3, 6)), (15, 5, 12));
    }

    #[test]
    fn prime_splits() {
        let sp = PrimeSplit::new(12, 4).unwrap();
        assert_eq!((sp.primes.clone(), sp.cut, sp.s, sp.total()), (vec![2, 2, 3], 2, 3, 3));
        assert!(PrimeSplit::new(12, 5).is_none());
        assert_eq!(PrimeSplit::all(6).iter().map(|s| s.r).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn split_builders() {
        let d = build_case_primesplit_l2(&params(2, 6, 3, 6), &PrimeSplit::new(6, 2).unwrap()).unwrap();
        assert_eq!(d.len(), 15);
        assert_eq!(verify_arcs(&d, &params(2, 6, 3, 6)), Ok(()));
        let d = build_case_primesplit_l2(&params(2, 6, 3, 3), &PrimeSplit::new(6, 2).unwrap()).unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(verify_arcs(&d, &params(2, 6, 3, 3)), Ok(()));
        let d = build_case_primesplit_l1(&params(1, 12, 5, 3), &PrimeSplit::new(12, 4).unwrap()).unwrap();
        assert_eq!(verify_arcs(&d, &params(1, 12, 5, 3)), Ok(()));
        assert!(build_case_primesplit_l1(&params(1, 12, 9, 3), &PrimeSplit::new(12, 4).unwrap()).is_err());
        assert!(build_case_l1(&params(1, 4, 9, 3)).is_err());
    }
}
