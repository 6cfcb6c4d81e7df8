//! Composite factorizations built from the elementary blocks: partial cycle
//! factorizations of `K_{k+1} × K_t`, cycle factorizations of `C_k × K_t` and
//! `C_k × K_s`, and `C_k`-factorizations of `K_3 × K_{ky}`.
//!
//! Throughout, a product with a cycle `C_n × K_m` uses the cycle positions as
//! parts and the points of `K_m` as slots. Blowing a point `a` up by `K̄_s` sends
//! it to the slots `a·s .. a·s + s − 1`.

use thiserror::Error;

use crate::blocks::{hamilton_decomposition_odd, kplus1_sequences, BlockError, BlockProvider};
use crate::graphs::{
    assemble_from_distances, complete, cycle_graph, tensor, Cycle, Decomposition, DistanceVector, GraphError, Host,
    PartialFactor, Vertex,
};
use crate::verify::verify_decomposition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{what} failed verification: {detail}")]
    Verification { what: String, detail: String },
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ComposeError> {
    if ok {
        Ok(())
    } else {
        Err(ComposeError::Hypothesis(msg()))
    }
}

fn checked(what: String, d: Decomposition, k: usize) -> Result<Decomposition, ComposeError> {
    verify_decomposition(&d, k).map_err(|v| ComposeError::Verification { what, detail: v.to_string() })?;
    Ok(d)
}

/// Relabels the parts of a block on `C_n × K_m` by the points of a written cycle.
pub(crate) fn lift_cycle(seq: &[u32], block_cycle: &Cycle) -> Result<Cycle, GraphError> {
    block_cycle.map(|v| Vertex::new(seq[v.part as usize], v.slot))
}

/// Lifts each factor of a `C_n × K_m` block along every written cycle of a
/// point factor; factor `l` of the result uses factor `l` of the block on each cycle.
pub(crate) fn lift_along(
    seqs: &[Vec<u32>],
    block: &Decomposition,
    hole: Option<u32>,
) -> Result<Vec<PartialFactor>, GraphError> {
    block
        .factors
        .iter()
        .map(|f| {
            let mut cycles = Vec::new();
            for seq in seqs {
                for c in &f.cycles {
                    cycles.push(lift_cycle(seq, c)?);
                }
            }
            Ok(PartialFactor::new(hole, f.cycle_length, cycles))
        })
        .collect()
}

/// Alternating distances `(a, b, a, b, …)` of even length `n`.
fn alternating(n: usize, a: u32, b: u32) -> Vec<u32> {
    (0..n).map(|j| if j % 2 == 0 { a } else { b }).collect()
}

/// Partial `C_k`-factorization of `K_{k+1} × K_t`, `k ≡ 0 (mod 4)`, `t` odd.
///
/// Factor `G_i^r` threads alternating distances `r, t − r` along the written
/// near-factor `G_i` (starting with `t − r` when `i` is even) and misses the part
/// `G_i` misses; the rim `G_∞` starts with `r`. Parts `0..k` are the points, part
/// `k` is `∞`.
pub fn partial_ck_factorization_kplus1_times_t(k: u32, t: u32) -> Result<Decomposition, ComposeError> {
    require(k >= 4 && k % 4 == 0, || format!("k = {k} must be a positive multiple of 4"))?;
    require(t >= 3 && t % 2 == 1, || format!("t = {t} must be odd and at least 3"))?;
    let mut factors = Vec::new();
    for (index, (hole, seq)) in kplus1_sequences(k).into_iter().enumerate() {
        let rim = index as u32 == k;
        for r in 1..=(t - 1) / 2 {
            let dv = if rim || index % 2 == 1 {
                alternating(k as usize, r, t - r)
            } else {
                alternating(k as usize, t - r, r)
            };
            let f = assemble_from_distances(&seq, &DistanceVector(dv), t)?;
            factors.push(PartialFactor::new(Some(hole), k as usize, f.cycles));
        }
    }
    let d = Decomposition::new(Host::Tensor { u: k + 1, g: t, lambda: 1 }, factors, "kplus1-alternating");
    checked(format!("partial C_{k}-factorization of K_{} × K_{t}", k + 1), d, k as usize)
}

/// Distances of the two Hamilton factors of `C_t × C_k` along a `t`-cycle of
/// parts of size `k`: `1` on even positions and `k − 1` on odd ones, or the swap.
fn lemma_distances(t: u32, k: u32, swap: bool) -> Vec<u32> {
    (0..t).map(|j| if (j % 2 == 0) != swap { 1 } else { k - 1 }).collect()
}

/// Hamilton factor of `C_t × C_k` along the `t`-cycle `points`, transposed so
/// that position `p` on the `k`-cycle `seq` becomes part `seq[p]` and the
/// point of `K_t` becomes the slot.
fn lemma_factor(points: &[u32], seq: &[u32], k: u32, swap: bool) -> Result<Cycle, GraphError> {
    let t = points.len() as u32;
    let f = assemble_from_distances(points, &DistanceVector(lemma_distances(t, k, swap)), k)?;
    debug_assert_eq!(f.cycles.len(), 1);
    f.cycles[0].map(|v| Vertex::new(seq[v.slot as usize], v.part))
}

fn hamilton_points(t: u32) -> Result<Vec<Vec<u32>>, ComposeError> {
    Ok(hamilton_decomposition_odd(t)?.iter().map(|c| c.vertices().iter().map(|v| v.part).collect()).collect())
}

/// `C_{kt}`-factorization of `C_k × K_t`, `k` even, `t` odd: for each Hamilton
/// cycle of `K_t`, the two factors `G` and `H` of `C_t × C_k`.
pub fn ckt_factorization_cycle_times_t(k: u32, t: u32) -> Result<Decomposition, ComposeError> {
    require(k >= 4 && k % 2 == 0, || format!("k = {k} must be even and at least 4"))?;
    require(t >= 3 && t % 2 == 1, || format!("t = {t} must be odd and at least 3"))?;
    let seq: Vec<u32> = (0..k).collect();
    let mut factors = Vec::new();
    for points in hamilton_points(t)? {
        for swap in [false, true] {
            factors.push(PartialFactor::new(None, (k * t) as usize, vec![lemma_factor(&points, &seq, k, swap)?]));
        }
    }
    let host = Host::Graph(tensor(&cycle_graph(k)?, &complete(t, 1)?));
    checked(
        format!("C_{}-factorization of C_{k} × K_{t}", k * t),
        Decomposition::new(host, factors, "cycle-times-odd"),
        (k * t) as usize,
    )
}

/// How the factors of the `K_{k+1} × K_t` construction with cycle length `kt`
/// are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThreeThreeReading {
    /// `G_{i,j}` and `H_j^∞` are separate partial factors.
    #[default]
    Separate,
    /// Each `G_{i,j}` is merged with `H_j^∞`, as the family is written.
    Merged,
}

/// Partial `C_{kt}`-factorization of `K_{k+1} × K_t`, `k` even, `t` odd.
pub fn partial_ckt_factorization_kplus1_times_t(k: u32, t: u32) -> Result<Decomposition, ComposeError> {
    partial_ckt_factorization_kplus1_times_t_with(k, t, ThreeThreeReading::Separate)
}

pub fn partial_ckt_factorization_kplus1_times_t_with(
    k: u32,
    t: u32,
    reading: ThreeThreeReading,
) -> Result<Decomposition, ComposeError> {
    require(k >= 4 && k % 2 == 0, || format!("k = {k} must be even and at least 4"))?;
    require(t >= 3 && t % 2 == 1, || format!("t = {t} must be odd and at least 3"))?;
    let len = (k * t) as usize;
    let hamilton = hamilton_points(t)?;
    let sequences = kplus1_sequences(k);
    let (rim_hole, rim) = sequences.last().cloned().expect("rim present");
    let rim_factors = hamilton
        .iter()
        .map(|points| Ok(PartialFactor::new(Some(rim_hole), len, vec![lemma_factor(points, &rim, k, true)?])))
        .collect::<Result<Vec<_>, GraphError>>()?;
    let mut factors = Vec::new();
    for (hole, seq) in &sequences[..k as usize] {
        for (j, points) in hamilton.iter().enumerate() {
            let f = PartialFactor::new(Some(*hole), len, vec![lemma_factor(points, seq, k, false)?]);
            factors.push(match reading {
                ThreeThreeReading::Separate => f,
                ThreeThreeReading::Merged => f.merged(rim_factors[j].clone()),
            });
        }
    }
    if reading == ThreeThreeReading::Separate {
        factors.extend(rim_factors);
    }
    let d = Decomposition::new(Host::Tensor { u: k + 1, g: t, lambda: 1 }, factors, "kplus1-hamilton");
    checked(format!("partial C_{len}-factorization of K_{} × K_{t}", k + 1), d, len)
}

/// Places a factor of `K_3 × K_k` (or of a `K_3 × K_y` blow-up) into block `b` of
/// `K_3 × K_{ky}`: slot `s` becomes `b·k + s`.
fn shift_slots(c: &Cycle, offset: u32) -> Result<Cycle, GraphError> {
    c.map(|v| Vertex::new(v.part, v.slot + offset))
}

/// `C_k`-factorization of `K_3 × K_k`, `k` even ≥ 6: the Walecki Hamilton
/// cycles of `K_k` times `K_3` give two factors each, the cubic remainder three.
fn k3_times_kk(provider: &BlockProvider, k: u32) -> Result<Vec<PartialFactor>, ComposeError> {
    let split = provider.walecki_split(k)?;
    let pair = provider.ck_factorization_cycle_times_complete(k, 3)?.decomposition;
    let mut factors = Vec::new();
    // In `C_k × K_3` the cycle positions are parts; transpose to parts of `K_3`.
    for h in &split.hamilton {
        let seq: Vec<u32> = h.vertices().iter().map(|v| v.part).collect();
        for f in &pair.factors {
            let cycles = f
                .cycles
                .iter()
                .map(|c| c.map(|v| Vertex::new(v.slot, seq[v.part as usize])))
                .collect::<Result<Vec<_>, _>>()?;
            factors.push(PartialFactor::new(None, k as usize, cycles));
        }
    }
    let cubic = provider.cubic_times_k3_factorization(k, &split)?.decomposition;
    for f in &cubic.factors {
        let cycles = f.cycles.iter().map(|c| c.map(|v| Vertex::new(v.slot, v.part))).collect::<Result<Vec<_>, _>>()?;
        factors.push(PartialFactor::new(None, k as usize, cycles));
    }
    Ok(factors)
}

/// `C_k`-factorization of `K_3 × K_{ky}`.
///
/// `y = 1` uses [`k3_times_kk`]. Otherwise `K_3 × K_{ky}` is split into
/// `(K_3 × K_y) ⊗ K̄_k` and `y` copies of `K_3 × K_k` on slot blocks. For odd `y`
/// the blow-up is covered by `C_3`-factors of `K_3 × K_y` blown to `K_{k,k,k}`; for
/// even `y` by Hamilton cycles of `K_3 × K_y` split into two perfect matchings
/// blown to `K_{k,k}`.
pub fn ck_factorization_k3_times_kky(k: u32, y: u32) -> Result<Decomposition, ComposeError> {
    ck_factorization_k3_times_kky_with(BlockProvider::global(), k, y)
}

pub fn ck_factorization_k3_times_kky_with(
    provider: &BlockProvider,
    k: u32,
    y: u32,
) -> Result<Decomposition, ComposeError> {
    require(k >= 6 && k % 2 == 0 && y >= 1, || format!("k = {k} must be even and at least 6, y = {y} positive"))?;
    require(y % 2 == 1 || k > 6, || format!("k = 6 with even y = {y} is not covered"))?;
    let n = k * y;
    let hole_factors = k3_times_kk(provider, k)?;
    let mut factors: Vec<PartialFactor> = hole_factors
        .iter()
        .map(|f| {
            let cycles = (0..y)
                .flat_map(|b| f.cycles.iter().map(move |c| shift_slots(c, b * k)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PartialFactor::new(None, k as usize, cycles))
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let blow = |v: Vertex, part: u32, point: u32| Vertex::new(part, point * k + v.slot);
    if y >= 2 && y % 2 == 1 {
        let triangles = provider.ck_factorization_cycle_times_complete(3, y)?.decomposition;
        let tripartite = provider.ct_factorization_tripartite(k)?.decomposition;
        for tf in &triangles.factors {
            for pf in &tripartite.factors {
                let mut cycles = Vec::new();
                for tri in &tf.cycles {
                    let slot_of =
                        |part: u32| tri.vertices().iter().find(|v| v.part == part).expect("one vertex per part").slot;
                    for c in &pf.cycles {
                        cycles.push(c.map(|v| blow(v, v.part, slot_of(v.part)))?);
                    }
                }
                factors.push(PartialFactor::new(None, k as usize, cycles));
            }
        }
    } else if y >= 2 {
        let hamilton = provider.hamilton_decomp_cycle_times_complete(3, y)?.decomposition;
        let bipartite = provider.ck_factorization_bipartite(k, k, k)?.decomposition;
        for hf in &hamilton.factors {
            let ham = hf.cycles[0].vertices();
            for parity in 0..2 {
                for bf in &bipartite.factors {
                    let mut cycles = Vec::new();
                    for j in (parity..ham.len()).step_by(2) {
                        let (a, b) = (ham[j], ham[(j + 1) % ham.len()]);
                        for c in &bf.cycles {
                            cycles.push(c.map(|v| {
                                if v.part == 0 {
                                    blow(v, a.part, a.slot)
                                } else {
                                    blow(v, b.part, b.slot)
                                }
                            })?);
                        }
                    }
                    factors.push(PartialFactor::new(None, k as usize, cycles));
                }
            }
        }
    }
    let d = Decomposition::new(Host::Tensor { u: 3, g: n, lambda: 1 }, factors, "k3-times-complete");
    checked(format!("C_{k}-factorization of K_3 × K_{n}"), d, k as usize)
}

/// `C_{kt}`-factorization of `C_k × K_s`, `s ≡ 0 (mod 2t)`.
///
/// Odd `t` threads distance vectors directly. Even `t` splits off `2y` slot
/// blocks of `C_k × K_t` (Hamilton factors) and covers `(C_k × K_{2y}) ⊗ K̄_t`
/// with the alternating factors `G_l` of `C_k × K_{2y}`, each cycle blown up by
/// the Hamilton factors of `C_k ⊗ K̄_t`.
pub fn ckt_factorization_cycle_times_s(k: u32, t: u32, s: u32) -> Result<Decomposition, ComposeError> {
    ckt_factorization_cycle_times_s_with(BlockProvider::global(), k, t, s)
}

pub fn ckt_factorization_cycle_times_s_with(
    provider: &BlockProvider,
    k: u32,
    t: u32,
    s: u32,
) -> Result<Decomposition, ComposeError> {
    require(k >= 4 && k % 2 == 0, || format!("k = {k} must be even and at least 4"))?;
    require(t >= 3 && s > 0 && s % (2 * t) == 0, || format!("s = {s} must be a positive multiple of {}", 2 * t))?;
    let len = (k * t) as usize;
    let host = Host::Graph(tensor(&cycle_graph(k)?, &complete(s, 1)?));
    if t % 2 == 1 {
        let d = provider.cycle_times_complete(k, s, t)?.decomposition;
        return checked(format!("C_{len}-factorization of C_{k} × K_{s}"), Decomposition { host, ..d }, len);
    }
    let d = cycle_times_complete_blocked_with(provider, k, t, s / t, t)?;
    Ok(Decomposition { host, ..d })
}

/// `C_{kq}`-factorization of `C_k × K_{ty}` through slot blocks of size `t`.
pub fn cycle_times_complete_blocked(k: u32, t: u32, y: u32, q: u32) -> Result<Decomposition, ComposeError> {
    cycle_times_complete_blocked_with(BlockProvider::global(), k, t, y, q)
}

/// `C_{kq}`-factorization of `C_k × K_{ty}`, `q | t`.
///
/// The slot blocks of size `t` carry `y` copies of a `C_{kq}`-factorization of
/// `C_k × K_t`; each cycle of a `C_k`-factorization of `C_k × K_y` is blown up by
/// the `C_{kq}`-factors of `C_k ⊗ K̄_t`.
pub fn cycle_times_complete_blocked_with(
    provider: &BlockProvider,
    k: u32,
    t: u32,
    y: u32,
    q: u32,
) -> Result<Decomposition, ComposeError> {
    require(k >= 3 && t >= 2 && y >= 1 && q >= 1 && t % q == 0, || {
        format!("C_{k} × K_{t}·{y} with cycle length {k}·{q} is out of range")
    })?;
    let len = (k * q) as usize;
    let host = Host::Graph(tensor(&cycle_graph(k)?, &complete(t * y, 1)?));
    let holes = provider.cycle_times_complete(k, t, q)?.decomposition;
    let mut factors = Vec::new();
    for f in &holes.factors {
        let cycles =
            (0..y).flat_map(|b| f.cycles.iter().map(move |c| shift_slots(c, b * t))).collect::<Result<Vec<_>, _>>()?;
        factors.push(PartialFactor::new(None, len, cycles));
    }
    if y >= 2 {
        let base = provider.cycle_times_complete(k, y, 1)?.decomposition;
        let lex = provider.cycle_lex_empty(k, t, q)?.decomposition;
        for g_l in &base.factors {
            for hf in &lex.factors {
                let mut cycles = Vec::new();
                for c in &g_l.cycles {
                    // Position p of the C_k-cycle sits in the slot block of `c` at part p.
                    let mut slot_at = vec![0; k as usize];
                    for v in c.vertices() {
                        slot_at[v.part as usize] = v.slot;
                    }
                    for hc in &hf.cycles {
                        cycles.push(hc.map(|v| Vertex::new(v.part, slot_at[v.part as usize] * t + v.slot))?);
                    }
                }
                factors.push(PartialFactor::new(None, len, cycles));
            }
        }
    }
    let d = Decomposition::new(host, factors, "cycle-times-blocks");
    checked(format!("C_{len}-factorization of C_{k} × K_{}", t * y), d, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_decomposition;

    fn hole_counts(d: &Decomposition, parts: u32) -> Vec<usize> {
        (0..parts).map(|p| d.factors.iter().filter(|f| f.hole == Some(p)).count()).collect()
    }

    #[test]
    fn kplus1_times_t_counts() {
        for (k, t, expected) in [(4, 3, 5), (4, 5, 10), (8, 3, 9)] {
            let d = partial_ck_factorization_kplus1_times_t(k, t).unwrap();
            assert_eq!(d.len(), expected, "({k},{t})");
            assert!(d.factors.iter().all(|f| f.edge_count() == (t * k) as usize));
            assert_eq!(hole_counts(&d, k + 1), vec![((t - 1) / 2) as usize; (k + 1) as usize]);
        }
        assert!(partial_ck_factorization_kplus1_times_t(6, 3).is_err());
        assert!(partial_ck_factorization_kplus1_times_t(4, 4).is_err());
    }

    #[test]
    fn cycle_times_odd_is_hamilton() {
        for (k, t) in [(4, 3), (6, 3), (4, 5)] {
            let d = ckt_factorization_cycle_times_t(k, t).unwrap();
            assert_eq!(d.len(), (t - 1) as usize);
            assert!(d.factors.iter().all(|f| f.cycles.len() == 1 && f.cycles[0].len() == (k * t) as usize));
        }
    }

    #[test]
    fn kplus1_hamilton_readings() {
        for (k, t) in [(4, 3), (6, 3), (4, 5)] {
            let d = partial_ckt_factorization_kplus1_times_t(k, t).unwrap();
            assert_eq!(d.len(), ((k + 1) * (t - 1) / 2) as usize);
            assert_eq!(hole_counts(&d, k + 1), vec![((t - 1) / 2) as usize; (k + 1) as usize]);
        }
        assert!(matches!(
            partial_ckt_factorization_kplus1_times_t_with(4, 3, ThreeThreeReading::Merged),
            Err(ComposeError::Verification { .. })
        ));
    }

    #[test]
    fn k3_times_kky_counts() {
        for (k, y) in [(6, 1), (8, 1), (8, 2), (6, 3)] {
            let d = ck_factorization_k3_times_kky(k, y).unwrap();
            assert_eq!(d.len(), (k * y - 1) as usize, "({k},{y})");
            assert_eq!(verify_decomposition(&d, k as usize), Ok(()));
        }
        assert!(matches!(ck_factorization_k3_times_kky(6, 2), Err(ComposeError::Hypothesis(_))));
    }

    #[test]
    fn cycle_times_s_counts() {
        for (k, t, s) in [(4, 3, 6), (4, 4, 8), (6, 3, 6)] {
            let d = ckt_factorization_cycle_times_s(k, t, s).unwrap();
            assert_eq!(d.len(), (s - 1) as usize, "({k},{t},{s})");
            assert!(d.factors.iter().flat_map(|f| &f.cycles).all(|c| c.len() == (k * t) as usize));
        }
    }
}
