//! Elementary factorizations that the larger constructions are assembled from.
//!
//! Each family has a closed-form construction where one is known and otherwise
//! falls back to bounded search. Every result is checked by [`crate::verify`]
//! before it is handed out, and search results are cached on disk.

mod cache;
pub(crate) mod distance;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{
    assemble_from_distances, complete, complete_multipartite, cycle_graph, edge, lexicographic_empty, point_graph,
    tensor, Cycle, Decomposition, DistanceVector, Edge, GraphError, Host, Matching, MultiGraph, PartialFactor, Vertex,
};
use crate::search::{FactorSlot, SearchOutcome, SearchProblem};
use crate::verify::{verify_decomposition, verify_matchings};
use distance::DistanceSystem;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockFamily {
    NearOneFactorization,
    NearCkFactorKu2,
    CkFactorKuLambda,
    NearCmFactorKms1Doubled,
    CkFactorKmn,
    HamDecompCoddxK,
    HamDecompCevenxK,
    HamDecompCxKbar,
    CkFactorCkxKm,
    CubicTimesK3,
    CtFactorKttt,
    PartialOneFactorKuKbar,
    WaleckiSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSpec {
    pub family: BlockFamily,
    pub params: Vec<u32>,
}

impl BlockSpec {
    pub fn new(family: BlockFamily, params: &[u32]) -> Self {
        BlockSpec { family, params: params.to_vec() }
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.family, self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Explicit,
    Search,
    Cached,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockResult {
    pub decomposition: Decomposition,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("exceptional case {0}")]
    ExceptionalCase(String),
    #[error("cycle length {0} is too short")]
    DegenerateCycleLength(u32),
    #[error("no construction found for {0}")]
    UnsupportedBlock(String),
    #[error("block {spec} failed verification: {detail}")]
    Verification { spec: String, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn hypothesis(ok: bool, msg: impl FnOnce() -> String) -> Result<(), BlockError> {
    if ok {
        Ok(())
    } else {
        Err(BlockError::Hypothesis(msg()))
    }
}

fn p(i: u32) -> Vertex {
    Vertex::point(i)
}

fn points(seq: &[u32]) -> Result<Cycle, GraphError> {
    Cycle::new(seq.iter().map(|&i| p(i)).collect())
}

/// `j, j+1, j−1, j+2, j−2, …` modulo `modulus`, `count` terms.
fn zigzag(j: u32, modulus: u32, count: u32) -> Vec<u32> {
    let mut seq = vec![j % modulus];
    let mut step = 1;
    while (seq.len() as u32) < count {
        seq.push((j + step) % modulus);
        if (seq.len() as u32) < count {
            seq.push((j + modulus * step - step) % modulus);
        }
        step += 1;
    }
    seq
}

/// Hamilton decomposition of `K_t`, `t` odd, on points `0..t` (point `t−1` is the centre).
pub fn hamilton_decomposition_odd(t: u32) -> Result<Vec<Cycle>, BlockError> {
    hypothesis(t >= 3 && t % 2 == 1, || format!("K_{t} needs odd order ≥ 3 for a Hamilton decomposition"))?;
    let inf = t - 1;
    (0..(t - 1) / 2)
        .map(|j| {
            let mut seq = vec![inf];
            seq.extend(zigzag(j, t - 1, t - 1));
            Ok(points(&seq)?)
        })
        .collect()
}

/// 1-factorization of `K_y`, `y` even, on points `0..y`.
pub fn one_factorization(y: u32) -> Result<Vec<Vec<(u32, u32)>>, BlockError> {
    hypothesis(y >= 2 && y % 2 == 0, || format!("K_{y} needs even order for a 1-factorization"))?;
    let inf = y - 1;
    let m = y - 1;
    Ok((0..m)
        .map(|j| {
            let mut pairs = vec![(j, inf)];
            for i in 1..=(y - 2) / 2 {
                pairs.push(((j + i) % m, (j + m - i) % m));
            }
            pairs
        })
        .collect())
}

/// The near-`C_k`-factors of `K_{k+1}(2)` as written point sequences, with the
/// missing point: `(i, i+1, i−1, …, ∞)` misses `i + k/2`, the rim `(0, …, k−1)`
/// misses `∞ = k`.
pub fn kplus1_sequences(k: u32) -> Vec<(u32, Vec<u32>)> {
    let inf = k;
    let mut out: Vec<(u32, Vec<u32>)> = (0..k)
        .map(|i| {
            let mut seq = zigzag(i, k, k - 1);
            seq.push(inf);
            ((i + k / 2) % k, seq)
        })
        .collect();
    out.push((inf, (0..k).collect()));
    out
}

/// Cycles of `F_a(A,B) ∪ F_b(A,B)` between parts of size `n`.
pub fn two_matching_cycles(part_a: u32, part_b: u32, a: u32, b: u32, n: u32) -> Result<Vec<Cycle>, GraphError> {
    let mut seen = vec![false; n as usize];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start as usize] {
            continue;
        }
        let mut vs = Vec::new();
        let mut x = start;
        loop {
            seen[x as usize] = true;
            vs.push(Vertex::new(part_a, x));
            let y = (x + a) % n;
            vs.push(Vertex::new(part_b, y));
            x = (y + n - b % n) % n;
            if x == start {
                break;
            }
        }
        cycles.push(Cycle::new(vs)?);
    }
    Ok(cycles)
}

/// Walecki decomposition of `K_k` split as Hamilton cycles plus a cubic remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaleckiSplit {
    pub hamilton: Vec<Cycle>,
    /// Hamilton cycle kept for the cubic remainder.
    pub last: Cycle,
    pub matching: Vec<Edge>,
    pub cubic: MultiGraph,
}

pub struct BlockProvider {
    cache_dir: Option<PathBuf>,
    budget: u64,
    memo: Mutex<HashMap<BlockSpec, Decomposition>>,
    /// Specs whose search already failed in this process.
    failed: Mutex<HashMap<BlockSpec, String>>,
}

static GLOBAL: OnceLock<BlockProvider> = OnceLock::new();

type Found = Result<Vec<PartialFactor>, String>;

impl BlockProvider {
    pub fn new(cache_dir: Option<PathBuf>, budget: u64) -> Self {
        BlockProvider { cache_dir, budget, memo: Mutex::new(HashMap::new()), failed: Mutex::new(HashMap::new()) }
    }

    /// Cache directory from `CYCLEFRAME_CACHE`, default `.cycleframe-cache/`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os("CYCLEFRAME_CACHE").map(PathBuf::from).unwrap_or_else(|| ".cycleframe-cache".into());
        BlockProvider::new(Some(dir), DEFAULT_BUDGET)
    }

    pub fn global() -> &'static BlockProvider {
        GLOBAL.get_or_init(BlockProvider::from_env)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn checked(
        &self,
        spec: &BlockSpec,
        d: Decomposition,
        k: usize,
        strategy: Strategy,
    ) -> Result<BlockResult, BlockError> {
        verify_decomposition(&d, k)
            .map_err(|v| BlockError::Verification { spec: spec.to_string(), detail: v.to_string() })?;
        Ok(BlockResult { decomposition: d, strategy })
    }

    fn explicit(
        &self,
        spec: BlockSpec,
        host: Host,
        k: usize,
        factors: Vec<PartialFactor>,
        tag: &str,
    ) -> Result<BlockResult, BlockError> {
        self.checked(&spec, Decomposition::new(host, factors, tag), k, Strategy::Explicit)
    }

    /// Memory, then disk, then `run`; the result is verified on every path.
    fn searched(
        &self,
        spec: BlockSpec,
        host: Host,
        k: usize,
        run: impl FnOnce(u64) -> Found,
    ) -> Result<BlockResult, BlockError> {
        let tag = "search";
        if let Some(d) = self.memo.lock().expect("memo lock").get(&spec).cloned() {
            return Ok(BlockResult { decomposition: d, strategy: Strategy::Cached });
        }
        if let Some(dir) = &self.cache_dir {
            if let Some(factors) = cache::load(dir, &spec) {
                let d = Decomposition::new(host.clone(), factors, tag);
                if verify_decomposition(&d, k).is_ok() {
                    self.memo.lock().expect("memo lock").insert(spec, d.clone());
                    return Ok(BlockResult { decomposition: d, strategy: Strategy::Cached });
                }
            }
        }
        if let Some(why) = self.failed.lock().expect("failure lock").get(&spec) {
            return Err(BlockError::UnsupportedBlock(format!("{spec}: {why}")));
        }
        let factors = match run(self.budget) {
            Ok(factors) => factors,
            Err(why) => {
                self.failed.lock().expect("failure lock").insert(spec.clone(), why.clone());
                return Err(BlockError::UnsupportedBlock(format!("{spec}: {why}")));
            }
        };
        let result = self.checked(&spec, Decomposition::new(host, factors, tag), k, Strategy::Search)?;
        if let Some(dir) = &self.cache_dir {
            // A failed write only costs a repeated search later.
            let _ = cache::store(dir, &spec, k, &result.decomposition.factors);
        }
        self.memo.lock().expect("memo lock").insert(spec, result.decomposition.clone());
        Ok(result)
    }

    fn factor_search(host: &MultiGraph, slots: Vec<FactorSlot>, k: usize, budget: u64) -> Found {
        match SearchProblem::new(host, slots, k).solve(budget) {
            SearchOutcome::Found(f) => Ok(f),
            SearchOutcome::Exhausted => Err("search space exhausted".into()),
            SearchOutcome::BudgetExceeded => Err(format!("budget of {budget} nodes exceeded")),
        }
    }

    fn full_slots(host: &MultiGraph, count: usize) -> Vec<FactorSlot> {
        (0..count).map(|_| FactorSlot { hole: None, span: vec![true; host.vertex_count()] }).collect()
    }

    /// Near-1-factorization of `K_u`, `u` odd; factor `m` misses point `m`.
    pub fn near_one_factorization(&self, u: u32) -> Result<Vec<Matching>, BlockError> {
        hypothesis(u >= 3 && u % 2 == 1, || format!("K_{u} has a near-1-factorization only for odd u ≥ 3"))?;
        let factors: Vec<Matching> = (0..u)
            .map(|m| Matching::new(Some(m), (1..=(u - 1) / 2).map(|j| (p((m + j) % u), p((m + u - j) % u)))))
            .collect();
        let host = complete(u, 1)?;
        verify_matchings(&factors, &host).map_err(|v| BlockError::Verification {
            spec: BlockSpec::new(BlockFamily::NearOneFactorization, &[u]).to_string(),
            detail: v.to_string(),
        })?;
        Ok(factors)
    }

    /// Near-`C_k`-factorization of `K_{k+1}(2)` by rotating a zigzag cycle; the
    /// `i`-th factor misses point `i + k/2`, the last misses point `k`.
    pub fn near_ck_factorization_kplus1_doubled(&self, k: u32) -> Result<BlockResult, BlockError> {
        hypothesis(k >= 4 && k % 2 == 0, || format!("k = {k} must be even and at least 4"))?;
        let factors = kplus1_sequences(k)
            .into_iter()
            .map(|(hole, seq)| Ok(PartialFactor::new(Some(hole), k as usize, vec![points(&seq)?])))
            .collect::<Result<Vec<_>, BlockError>>()?;
        let spec = BlockSpec::new(BlockFamily::NearCkFactorKu2, &[k, k + 1]);
        self.explicit(spec, Host::Graph(complete(k + 1, 2)?), k as usize, factors, "rotated zigzag")
    }

    /// Near-`C_len`-factorization of `K_u(2)`, factors sorted by the missing point.
    pub fn near_cycle_factorization_doubled(&self, len: u32, u: u32) -> Result<BlockResult, BlockError> {
        if len < 3 {
            return Err(BlockError::DegenerateCycleLength(len));
        }
        hypothesis(u >= 1 && (u - 1) % len == 0, || format!("u = {u} must be 1 mod {len}"))?;
        let host = Host::Graph(complete(u, 2)?);
        let spec = BlockSpec::new(BlockFamily::NearCkFactorKu2, &[len, u]);
        if u == 1 {
            return self.explicit(spec, host, len as usize, vec![], "empty");
        }
        if u == len + 1 && len % 2 == 0 {
            let mut result = self.near_ck_factorization_kplus1_doubled(len)?;
            result.decomposition.factors.sort_by_key(|f| f.hole);
            return Ok(result);
        }
        if u == 4 && len == 3 {
            let factors = (0..4)
                .map(|m| {
                    let rest: Vec<u32> = (0..4).filter(|&x| x != m).collect();
                    Ok(PartialFactor::new(Some(m), 3, vec![points(&rest)?]))
                })
                .collect::<Result<Vec<_>, BlockError>>()?;
            return self.explicit(spec, host, 3, factors, "triangles of K_4");
        }
        self.searched(spec, host, len as usize, |budget| {
            let base = cyclic_base(u, false, len as usize, budget)?;
            develop(&base, u, false, len as usize)
        })
    }

    pub fn near_c2k_factorization_u2(&self, k: u32, u: u32) -> Result<BlockResult, BlockError> {
        hypothesis(u > 2 * k && (u - 1) % (2 * k) == 0, || format!("u = {u} must be 1 mod {} and larger", 2 * k))?;
        self.near_cycle_factorization_doubled(2 * k, u)
    }

    pub fn near_cm_factorization_ms1_doubled(&self, m: u32, s: u32) -> Result<BlockResult, BlockError> {
        hypothesis(m >= 3 && m % 2 == 1, || format!("m = {m} must be odd and at least 3"))?;
        self.near_cycle_factorization_doubled(m, m * s + 1)
    }

    /// `K_n(2)`, `n` even, as all `n − 1` rotations of one zigzag Hamilton cycle.
    fn hamilton_rotations_doubled(n: u32) -> Result<Vec<PartialFactor>, BlockError> {
        let inf = n - 1;
        (0..n - 1)
            .map(|j| {
                let mut seq = vec![inf];
                seq.extend(zigzag(j, n - 1, n - 1));
                Ok(PartialFactor::new(None, n as usize, vec![points(&seq)?]))
            })
            .collect()
    }

    /// `C_len`-factorization of `K_n(2)`, `len` even and `len | n`.
    pub fn cycle_factorization_complete_doubled(&self, len: u32, n: u32) -> Result<BlockResult, BlockError> {
        hypothesis(len >= 4 && len % 2 == 0, || format!("cycle length {len} must be even and at least 4"))?;
        hypothesis(n >= len && n % len == 0, || format!("n = {n} must be a multiple of {len}"))?;
        let y = n / len;
        let host = Host::Graph(complete(n, 2)?);
        let spec = BlockSpec::new(BlockFamily::CkFactorKuLambda, &[len, n, 2]);
        if y == 1 {
            let factors = Self::hamilton_rotations_doubled(n)?;
            return self.explicit(spec, host, len as usize, factors, "rotated zigzag");
        }
        if y % 2 == 0 {
            let inner = Self::hamilton_rotations_doubled(len)?;
            let block = |b: u32, v: Vertex| p(b * len + v.part);
            let mut factors = Vec::new();
            for f in &inner {
                let mut cycles = Vec::new();
                for b in 0..y {
                    cycles.push(f.cycles[0].map(|v| block(b, v))?);
                }
                factors.push(PartialFactor::new(None, len as usize, cycles));
            }
            for matching in one_factorization(y)? {
                for a in 0..len {
                    let mut cycles = Vec::new();
                    for &(b, c) in &matching {
                        for cyc in two_matching_cycles(0, 1, a, (a + 2) % len, len)? {
                            cycles.push(cyc.map(|v| {
                                let block = if v.part == 0 { b } else { c };
                                p(block * len + v.slot)
                            })?);
                        }
                    }
                    factors.push(PartialFactor::new(None, len as usize, cycles));
                }
            }
            return self.explicit(spec, host, len as usize, factors, "block frame");
        }
        self.searched(spec, host, len as usize, |budget| {
            let base = cyclic_base(n - 1, true, len as usize, budget)?;
            develop(&base, n - 1, true, len as usize)
        })
    }

    /// `C_{2m}`-factorization of `K_u(2)`.
    pub fn ck_factorization_complete_doubled(&self, m: u32, u: u32) -> Result<BlockResult, BlockError> {
        self.cycle_factorization_complete_doubled(2 * m, u)
    }

    /// `C_kk`-factorization of `K_{n,n}` (parts 0 and 1).
    pub fn ck_factorization_bipartite(&self, m: u32, n: u32, kk: u32) -> Result<BlockResult, BlockError> {
        if (m, n, kk) == (6, 6, 6) {
            return Err(BlockError::ExceptionalCase("K_{6,6} has no C_6-factorization".into()));
        }
        hypothesis(m == n && n % 2 == 0, || format!("K_{{{m},{n}}} needs equal even sides"))?;
        hypothesis(kk >= 4 && kk % 2 == 0 && (2 * n) % kk == 0, || {
            format!("cycle length {kk} must be even and divide {}", 2 * n)
        })?;
        let host = Host::Graph(complete_multipartite(2, n, 1)?);
        let spec = BlockSpec::new(BlockFamily::CkFactorKmn, &[n, kk]);
        if kk % 4 == 0 {
            let q = 2 * n / kk;
            let mut factors = Vec::new();
            for r in 0..q {
                for i in (0..kk / 2).step_by(2) {
                    let a = r + i * q;
                    let cycles = two_matching_cycles(0, 1, a, a + q, n)?;
                    factors.push(PartialFactor::new(None, kk as usize, cycles));
                }
            }
            return self.explicit(spec, host, kk as usize, factors, "paired distance matchings");
        }
        let graph = host.materialize()?;
        self.searched(spec, host, kk as usize, |budget| {
            Self::factor_search(&graph, Self::full_slots(&graph, (n / 2) as usize), kk as usize, budget)
        })
    }

    /// `C_{len·q}`-factorization of `C_len × K_n`; positions around the cycle are parts.
    pub fn cycle_times_complete(&self, len: u32, n: u32, q: u32) -> Result<BlockResult, BlockError> {
        hypothesis(len >= 3 && n >= 2, || format!("C_{len} × K_{n} is out of range"))?;
        hypothesis(q >= 1 && n % q == 0, || format!("q = {q} must divide n = {n}"))?;
        let graph = tensor(&cycle_graph(len)?, &complete(n, 1)?);
        let host = Host::Graph(graph.clone());
        let family = match (q == n, len % 2) {
            (true, 1) => BlockFamily::HamDecompCoddxK,
            (true, _) => BlockFamily::HamDecompCevenxK,
            _ => BlockFamily::CkFactorCkxKm,
        };
        let spec = BlockSpec::new(family, &[len, n, q]);
        let k = (len * q) as usize;
        let system = DistanceSystem { length: len as usize, modulus: n, allow_zero: false, sum_gcd: n / q };
        if let Some(family) = system.solve() {
            let part_cycle: Vec<u32> = (0..len).collect();
            let factors = family
                .into_iter()
                .map(|dv| assemble_from_distances(&part_cycle, &DistanceVector(dv), n))
                .collect::<Result<Vec<_>, _>>()?;
            return self.explicit(spec, host, k, factors, "distance vectors");
        }
        self.searched(spec, host, k, |budget| {
            Self::factor_search(&graph, Self::full_slots(&graph, (n - 1) as usize), k, budget)
        })
    }

    pub fn ck_factorization_cycle_times_complete(&self, kk: u32, m: u32) -> Result<BlockResult, BlockError> {
        hypothesis(!(kk % 2 == 1 && m % 4 == 2), || format!("odd cycle length {kk} with m = {m} ≡ 2 (mod 4)"))?;
        self.cycle_times_complete(kk, m, 1)
    }

    pub fn hamilton_decomp_cycle_times_complete(&self, m: u32, n: u32) -> Result<BlockResult, BlockError> {
        self.cycle_times_complete(m, n, n)
    }

    /// Hamilton decomposition of `C_m ⊗ K̄_n`.
    pub fn hamilton_decomp_cycle_lex_empty(&self, m: u32, n: u32) -> Result<BlockResult, BlockError> {
        self.cycle_lex_empty(m, n, n)
    }

    /// `C_{mq}`-factorization of `C_m ⊗ K̄_n`, `q | n`.
    pub fn cycle_lex_empty(&self, m: u32, n: u32, q: u32) -> Result<BlockResult, BlockError> {
        hypothesis(m >= 3 && n >= 1, || format!("C_{m} ⊗ K̄_{n} is out of range"))?;
        hypothesis(q >= 1 && n % q == 0, || format!("q = {q} must divide n = {n}"))?;
        let graph = lexicographic_empty(&cycle_graph(m)?, n);
        let host = Host::Graph(graph.clone());
        let spec = if q == n {
            BlockSpec::new(BlockFamily::HamDecompCxKbar, &[m, n])
        } else {
            BlockSpec::new(BlockFamily::HamDecompCxKbar, &[m, n, q])
        };
        let k = (m * q) as usize;
        let system = DistanceSystem { length: m as usize, modulus: n, allow_zero: true, sum_gcd: n / q };
        if let Some(family) = system.solve() {
            let part_cycle: Vec<u32> = (0..m).collect();
            let factors = family
                .into_iter()
                .map(|dv| assemble_from_distances(&part_cycle, &DistanceVector(dv), n))
                .collect::<Result<Vec<_>, _>>()?;
            return self.explicit(spec, host, k, factors, "distance vectors");
        }
        self.searched(spec, host, k, |budget| {
            Self::factor_search(&graph, Self::full_slots(&graph, n as usize), k, budget)
        })
    }

    /// Walecki cycles of `K_k` on points `0..k` (point `k−1` is the centre).
    pub fn walecki_split(&self, k: u32) -> Result<WaleckiSplit, BlockError> {
        hypothesis(k >= 6 && k % 2 == 0, || format!("k = {k} must be even and at least 6"))?;
        let inf = k - 1;
        let half = k / 2;
        let mut cycles = (0..half - 1)
            .map(|j| {
                let mut seq = vec![inf];
                seq.extend(zigzag(j, k - 1, k - 1));
                points(&seq)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let last = cycles.pop().expect("at least two Walecki cycles");
        let mut matching = vec![edge(p(half - 1), p(inf))];
        for x in 0..k - 1 {
            let y = (2 * (k - 1) - 1 - x) % (k - 1);
            if x < y {
                matching.push(edge(p(x), p(y)));
            }
        }
        matching.sort();
        let mut pairs: Vec<(u32, u32)> = last.edges().map(|(a, b)| (a.part, b.part)).collect();
        pairs.extend(matching.iter().map(|(a, b)| (a.part, b.part)));
        let cubic = point_graph(k, &pairs)?;
        let mut union = cubic.clone();
        for c in &cycles {
            for (a, b) in c.edges() {
                union.add_edge(a, b, 1)?;
            }
        }
        if !union.same_edges(&complete(k, 1)?) {
            return Err(BlockError::Verification {
                spec: BlockSpec::new(BlockFamily::WaleckiSplit, &[k]).to_string(),
                detail: "parts do not partition K_k".into(),
            });
        }
        Ok(WaleckiSplit { hamilton: cycles, last, matching, cubic })
    }

    /// Three `C_k`-factors of `G × K_3` for the cubic remainder of [`Self::walecki_split`].
    pub fn cubic_times_k3_factorization(&self, k: u32, split: &WaleckiSplit) -> Result<BlockResult, BlockError> {
        if k == 4 {
            return Err(BlockError::ExceptionalCase("(k,m) = (4,3)".into()));
        }
        hypothesis(k >= 6 && k % 2 == 0 && split.cubic.vertex_count() == k as usize, || {
            format!("cubic graph of order {k} expected")
        })?;
        let graph = tensor(&split.cubic, &complete(3, 1)?);
        let host = Host::Graph(graph.clone());
        let spec = BlockSpec::new(BlockFamily::CubicTimesK3, &[k]);
        if let Some(factors) = cubic_closed_form(k, split)? {
            return self.explicit(spec, host, k as usize, factors, "threaded Hamilton cycles");
        }
        self.searched(spec, host, k as usize, |budget| {
            Self::factor_search(&graph, Self::full_slots(&graph, 3), k as usize, budget)
        })
    }

    /// `C_t`-factorization of `K_{t,t,t}` (parts 0, 1, 2).
    pub fn ct_factorization_tripartite(&self, t: u32) -> Result<BlockResult, BlockError> {
        if t < 3 {
            return Err(BlockError::DegenerateCycleLength(t));
        }
        let graph = complete_multipartite(3, t, 1)?;
        let host = Host::Graph(graph.clone());
        let spec = BlockSpec::new(BlockFamily::CtFactorKttt, &[t]);
        if t % 4 == 0 {
            let h = t / 2;
            let mut factors = Vec::new();
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let c = a ^ b;
                for j in 0..h / 2 {
                    let mut cycles = Vec::new();
                    for (pa, ha, pb, hb) in [(0, a, 1, b), (1, 1 - b, 2, c), (2, 1 - c, 0, 1 - a)] {
                        for cyc in two_matching_cycles(0, 1, 2 * j, 2 * j + 1, h)? {
                            cycles.push(cyc.map(|v| {
                                if v.part == 0 {
                                    Vertex::new(pa, ha * h + v.slot)
                                } else {
                                    Vertex::new(pb, hb * h + v.slot)
                                }
                            })?);
                        }
                    }
                    factors.push(PartialFactor::new(None, t as usize, cycles));
                }
            }
            return self.explicit(spec, host, t as usize, factors, "half-part Hamilton cycles");
        }
        self.searched(spec, host, t as usize, |budget| {
            Self::factor_search(&graph, Self::full_slots(&graph, t as usize), t as usize, budget)
        })
    }

    /// Partial 1-factorization of `K_u ⊗ K̄_g`: `g` matchings missing each part.
    pub fn partial_one_factorization_multipartite(&self, u: u32, g: u32) -> Result<Vec<Matching>, BlockError> {
        hypothesis(u >= 3 && g >= 1 && (g * (u - 1)) % 2 == 0, || {
            format!("K_{u} ⊗ K̄_{g} needs u ≥ 3 and g(u−1) even")
        })?;
        let host = complete_multipartite(u, g, 1)?;
        let spec = BlockSpec::new(BlockFamily::PartialOneFactorKuKbar, &[u, g]);
        let factors = if u % 2 == 1 {
            let mut out = Vec::new();
            for near in self.near_one_factorization(u)? {
                for d in 0..g {
                    let edges = near.edges.iter().flat_map(|&(a, b)| {
                        (0..g).map(move |s| (Vertex::new(a.part, s), Vertex::new(b.part, (s + d) % g)))
                    });
                    out.push(Matching::new(near.hole, edges));
                }
            }
            out
        } else {
            let h = g / 2;
            let base = even_part_matchings(u, 2, self.budget)
                .ok_or_else(|| BlockError::UnsupportedBlock(format!("{spec}: no matchings found")))?;
            let mut out = Vec::new();
            for m in &base {
                for d in 0..h {
                    let edges = m.edges.iter().flat_map(|&(a, b)| {
                        (0..h).map(move |i| {
                            (Vertex::new(a.part, a.slot * h + i), Vertex::new(b.part, b.slot * h + (i + d) % h))
                        })
                    });
                    out.push(Matching::new(m.hole, edges));
                }
            }
            out
        };
        let mut factors = factors;
        factors.sort_by_key(|m| m.hole);
        verify_matchings(&factors, &host)
            .map_err(|v| BlockError::Verification { spec: spec.to_string(), detail: v.to_string() })?;
        Ok(factors)
    }
}

/// The closed form for `G × K_3`: threads distances 1 and 2 (mod 3) around a
/// decomposition of the doubled cubic graph into three Hamilton cycles.
fn cubic_closed_form(k: u32, split: &WaleckiSplit) -> Result<Option<Vec<PartialFactor>>, BlockError> {
    let ham: Vec<u32> = split.last.vertices().iter().map(|v| v.part).collect();
    let matching: Vec<(u32, u32)> = split.matching.iter().map(|(a, b)| (a.part, b.part)).collect();
    if k == 6 {
        // H × K_3 splits by alternating distances; each matching edge × K_3 is a 6-cycle.
        let mut factors = Vec::new();
        for start in [1, 2] {
            let dv: Vec<u32> = (0..k).map(|j| if j % 2 == 0 { start } else { 3 - start }).collect();
            factors.push(thread(&ham, &dv)?);
        }
        let mut cycles = Vec::new();
        for &(a, b) in &matching {
            cycles.extend(thread(&[a, b], &[1, 1])?.cycles);
        }
        factors.push(PartialFactor::new(None, 6, cycles));
        return Ok(Some(factors));
    }
    // Tours H, M ∪ (even edges of H), M ∪ (odd edges of H).
    let n = ham.len();
    let mut mate = vec![0u32; n];
    for &(a, b) in &matching {
        mate[a as usize] = b;
        mate[b as usize] = a;
    }
    let position: Vec<usize> = {
        let mut pos = vec![0; n];
        for (i, &v) in ham.iter().enumerate() {
            pos[v as usize] = i;
        }
        pos
    };
    let tour = |parity: usize| -> Option<Vec<u32>> {
        // Alternate H-edges of the given parity with matching edges.
        let mut seq = vec![ham[0]];
        let mut cur = ham[0];
        let mut use_h = true;
        loop {
            let next = if use_h {
                let i = position[cur as usize];
                if i % 2 == parity {
                    ham[(i + 1) % n]
                } else {
                    ham[(i + n - 1) % n]
                }
            } else {
                mate[cur as usize]
            };
            use_h = !use_h;
            if next == ham[0] {
                break;
            }
            seq.push(next);
            cur = next;
        }
        (seq.len() == n).then_some(seq)
    };
    let (Some(even), Some(odd)) = (tour(0), tour(1)) else {
        return Ok(None);
    };
    // Matching index (which of F_1, F_2 in the orientation low → high) per G-edge, per tour.
    let orient = |a: u32, b: u32, d: u32| if a < b { d } else { 3 - d };
    let h_dv: Vec<u32> = (0..n).map(|j| if j % 2 == 0 { 1 } else { 2 }).collect();
    let mut h_index = std::collections::BTreeMap::new();
    for j in 0..n {
        let (a, b) = (ham[j], ham[(j + 1) % n]);
        h_index.insert((a.min(b), a.max(b)), orient(a, b, h_dv[j]));
    }
    let m_edges: Vec<(u32, u32)> = matching.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for mask in 0u64..(1u64 << m_edges.len()) {
        let m_index = |e: (u32, u32)| -> u32 {
            let i = m_edges.iter().position(|&x| x == e).expect("matching edge");
            if mask >> i & 1 == 1 {
                2
            } else {
                1
            }
        };
        let distances = |seq: &[u32], flip_m: bool| -> Vec<u32> {
            (0..n)
                .map(|j| {
                    let (a, b) = (seq[j], seq[(j + 1) % n]);
                    let e = (a.min(b), a.max(b));
                    let index = match h_index.get(&e) {
                        Some(&i) => 3 - i,
                        None => {
                            let i = m_index(e);
                            if flip_m {
                                3 - i
                            } else {
                                i
                            }
                        }
                    };
                    if a < b {
                        index
                    } else {
                        3 - index
                    }
                })
                .collect()
        };
        let dv_even = distances(&even, false);
        let dv_odd = distances(&odd, true);
        if dv_even.iter().sum::<u32>() % 3 == 0 && dv_odd.iter().sum::<u32>() % 3 == 0 {
            return Ok(Some(vec![thread(&ham, &h_dv)?, thread(&even, &dv_even)?, thread(&odd, &dv_odd)?]));
        }
    }
    Ok(None)
}

/// Distance threading on `G × K_3`: part cycle `seq` of points, slots mod 3.
fn thread(seq: &[u32], dv: &[u32]) -> Result<PartialFactor, GraphError> {
    if seq.len() == 2 {
        // A doubled edge: both matchings between the two parts give one 6-cycle.
        let (a, b) = (seq[0], seq[1]);
        let vs = vec![
            Vertex::new(a, 0),
            Vertex::new(b, 1),
            Vertex::new(a, 2),
            Vertex::new(b, 0),
            Vertex::new(a, 1),
            Vertex::new(b, 2),
        ];
        return Ok(PartialFactor::new(None, 6, vec![Cycle::new(vs)?]));
    }
    assemble_from_distances(seq, &DistanceVector(dv.to_vec()), 3)
}

/// Base factor for a cyclic development on `Z_modulus` (plus a fixed point when
/// `infinity`): every difference class is used exactly twice. Without the fixed
/// point the base factor misses residue 0.
fn cyclic_base(modulus: u32, infinity: bool, len: usize, budget: u64) -> Result<Vec<Vec<u32>>, String> {
    struct State {
        modulus: u32,
        inf: u32,
        len: usize,
        used: Vec<bool>,
        class: Vec<u8>,
        cycles: Vec<Vec<u32>>,
        nodes: u64,
        budget: u64,
    }
    impl State {
        fn class_of(&self, a: u32, b: u32) -> Option<usize> {
            if a == self.inf || b == self.inf {
                return None;
            }
            let d = (a + self.modulus - b) % self.modulus;
            Some(d.min(self.modulus - d) as usize)
        }
        /// The half-turn class develops into each of its edges twice already.
        fn limit(&self, c: usize) -> u8 {
            if 2 * c as u32 == self.modulus {
                1
            } else {
                2
            }
        }
        fn try_edge(&mut self, a: u32, b: u32) -> bool {
            match self.class_of(a, b) {
                None => true,
                Some(c) if self.class[c] < self.limit(c) => {
                    self.class[c] += 1;
                    true
                }
                _ => false,
            }
        }
        fn undo_edge(&mut self, a: u32, b: u32) {
            if let Some(c) = self.class_of(a, b) {
                self.class[c] -= 1;
            }
        }
        fn next(&mut self) -> Option<bool> {
            let Some(start) = (0..self.used.len()).find(|&v| !self.used[v]) else {
                return Some(true);
            };
            self.used[start] = true;
            let mut path = vec![start as u32];
            let r = self.extend(&mut path);
            if r != Some(true) {
                self.used[start] = false;
            }
            r
        }
        fn extend(&mut self, path: &mut Vec<u32>) -> Option<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let last = *path.last().expect("non-empty");
            let start = path[0];
            if path.len() == self.len {
                if !self.try_edge(last, start) {
                    return Some(false);
                }
                self.cycles.push(path.clone());
                let r = self.next();
                if r != Some(true) {
                    self.cycles.pop();
                    self.undo_edge(last, start);
                }
                return r;
            }
            for w in start + 1..self.used.len() as u32 {
                if self.used[w as usize] {
                    continue;
                }
                if path.len() + 1 == self.len && w < path[1] {
                    continue;
                }
                if !self.try_edge(last, w) {
                    continue;
                }
                self.used[w as usize] = true;
                path.push(w);
                let r = self.extend(path);
                if r == Some(true) {
                    return r;
                }
                path.pop();
                self.used[w as usize] = false;
                self.undo_edge(last, w);
                r?;
            }
            Some(false)
        }
    }
    let size = if infinity { modulus + 1 } else { modulus };
    let mut used = vec![false; size as usize];
    if !infinity {
        used[0] = true;
    }
    let mut state = State {
        modulus,
        inf: if infinity { modulus } else { u32::MAX },
        len,
        used,
        class: vec![0; (modulus / 2 + 1) as usize],
        cycles: Vec::new(),
        nodes: 0,
        budget,
    };
    match state.next() {
        Some(true) => Ok(state.cycles),
        Some(false) => Err("no cyclic base factor exists".into()),
        None => Err(format!("budget of {budget} nodes exceeded")),
    }
}

/// Translates of a base factor; without a fixed point, translate `i` misses point `i`.
fn develop(base: &[Vec<u32>], modulus: u32, infinity: bool, len: usize) -> Found {
    let shift = |v: u32, i: u32| if infinity && v == modulus { v } else { (v + i) % modulus };
    (0..modulus)
        .map(|i| {
            let cycles = base
                .iter()
                .map(|c| points(&c.iter().map(|&v| shift(v, i)).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            Ok(PartialFactor::new(if infinity { None } else { Some(i) }, len, cycles))
        })
        .collect()
}

/// Partial 1-factorization of `K_u ⊗ K̄_g` by backtracking, `g` matchings per hole.
fn even_part_matchings(u: u32, g: u32, budget: u64) -> Option<Vec<Matching>> {
    let n = (u * g) as usize;
    let vertex = |i: usize| Vertex::new(i as u32 / g, i as u32 % g);
    let part = |i: usize| i as u32 / g;
    let holes: Vec<u32> = (0..u).flat_map(|h| std::iter::repeat_n(h, g as usize)).collect();
    let avail: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| part(a) != part(b)).collect()).collect();
    struct Ctx<'a> {
        n: usize,
        holes: &'a [u32],
        part: &'a dyn Fn(usize) -> u32,
        avail: Vec<Vec<bool>>,
        covered: Vec<bool>,
        chosen: Vec<Vec<(usize, usize)>>,
        nodes: u64,
        budget: u64,
    }
    fn go(ctx: &mut Ctx, fi: usize) -> Option<bool> {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            return None;
        }
        if fi == ctx.holes.len() {
            return Some(true);
        }
        let hole = ctx.holes[fi];
        let start = (0..ctx.n).find(|&v| (ctx.part)(v) != hole && !ctx.covered[v]);
        let Some(a) = start else {
            ctx.covered = vec![false; ctx.n];
            ctx.chosen.push(Vec::new());
            let r = go(ctx, fi + 1);
            if r != Some(true) {
                ctx.chosen.pop();
                // Restore the completed factor's coverage.
                for &(x, y) in &ctx.chosen[fi] {
                    ctx.covered[x] = true;
                    ctx.covered[y] = true;
                }
            }
            return r;
        };
        for b in a + 1..ctx.n {
            if ctx.covered[b] || (ctx.part)(b) == hole || !ctx.avail[a][b] {
                continue;
            }
            ctx.avail[a][b] = false;
            ctx.avail[b][a] = false;
            ctx.covered[a] = true;
            ctx.covered[b] = true;
            ctx.chosen[fi].push((a, b));
            let r = go(ctx, fi);
            if r == Some(true) {
                return r;
            }
            ctx.chosen[fi].pop();
            ctx.covered[a] = false;
            ctx.covered[b] = false;
            ctx.avail[a][b] = true;
            ctx.avail[b][a] = true;
            r?;
        }
        Some(false)
    }
    let mut ctx = Ctx {
        n,
        holes: &holes,
        part: &part,
        avail,
        covered: vec![false; n],
        chosen: vec![Vec::new()],
        nodes: 0,
        budget,
    };
    if go(&mut ctx, 0) != Some(true) {
        return None;
    }
    let mut chosen = ctx.chosen;
    chosen.truncate(holes.len());
    Some(
        chosen
            .into_iter()
            .zip(&holes)
            .map(|(pairs, &h)| Matching::new(Some(h), pairs.into_iter().map(|(a, b)| (vertex(a), vertex(b)))))
            .collect(),
    )
}

/// Hole labels of a block's factors, for callers that thread holes.
pub fn holes(d: &Decomposition) -> BTreeSet<Option<u32>> {
    d.factors.iter().map(|f| f.hole).collect()
}

pub fn near_one_factorization(u: u32) -> Result<Vec<Matching>, BlockError> {
    BlockProvider::global().near_one_factorization(u)
}

pub fn near_ck_factorization_kplus1_doubled(k: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().near_ck_factorization_kplus1_doubled(k)?.decomposition)
}

pub fn near_c2k_factorization_u2(k: u32, u: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().near_c2k_factorization_u2(k, u)?.decomposition)
}

pub fn near_cm_factorization_ms1_doubled(m: u32, s: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().near_cm_factorization_ms1_doubled(m, s)?.decomposition)
}

pub fn ck_factorization_complete_doubled(m: u32, u: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().ck_factorization_complete_doubled(m, u)?.decomposition)
}

pub fn ck_factorization_bipartite(m: u32, n: u32, kk: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().ck_factorization_bipartite(m, n, kk)?.decomposition)
}

pub fn ck_factorization_cycle_times_complete(kk: u32, m: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().ck_factorization_cycle_times_complete(kk, m)?.decomposition)
}

pub fn hamilton_decomp_cycle_lex_empty(m: u32, n: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().hamilton_decomp_cycle_lex_empty(m, n)?.decomposition)
}

pub fn hamilton_decomp_cycle_times_complete(m: u32, n: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().hamilton_decomp_cycle_times_complete(m, n)?.decomposition)
}

pub fn walecki_split(k: u32) -> Result<WaleckiSplit, BlockError> {
    BlockProvider::global().walecki_split(k)
}

pub fn cubic_times_k3_factorization(k: u32, split: &WaleckiSplit) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().cubic_times_k3_factorization(k, split)?.decomposition)
}

pub fn ct_factorization_tripartite(t: u32) -> Result<Decomposition, BlockError> {
    Ok(BlockProvider::global().ct_factorization_tripartite(t)?.decomposition)
}

pub fn partial_one_factorization_multipartite(u: u32, g: u32) -> Result<Vec<Matching>, BlockError> {
    BlockProvider::global().partial_one_factorization_multipartite(u, g)
}
