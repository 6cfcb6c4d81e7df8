//! Acceptance criteria, one pass/fail line each. Tolerance is zero throughout:
//! every check is an exact combinatorial equality.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cycleframe::arcs::{build_arcs, check_feasibility, Condition, Feasibility, OpenFamily, Params};
use cycleframe::blocks::{near_ck_factorization_kplus1_doubled, near_one_factorization, walecki_split};
use cycleframe::compose::ckt_factorization_cycle_times_t;
use cycleframe::graphs::{Cycle, Decomposition, Vertex};
use cycleframe::io::from_json;
use cycleframe::verify::{brute_force_arcs, verify_arcs, BruteForce};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_cycleframe");

const END_TO_END: [(u32, u32, u32, u32); 13] = [
    (2, 4, 5, 2),
    (2, 4, 5, 3),
    (2, 4, 5, 6),
    (1, 4, 5, 3),
    (1, 4, 13, 3),
    (2, 6, 7, 2),
    (2, 6, 3, 6),
    (2, 4, 3, 4),
    (2, 6, 4, 6),
    (2, 8, 4, 8),
    (1, 12, 5, 3),
    (3, 4, 5, 3),
    (4, 4, 5, 2),
];

fn params((lambda, k, u, g): (u32, u32, u32, u32)) -> Params {
    Params { lambda, k, u, g }
}

fn run(args: &[String], cache: &Path) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env("CYCLEFRAME_CACHE", cache).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn param_args(cmd: &str, p: &Params) -> Vec<String> {
    let mut v = vec![cmd.to_string()];
    for (name, value) in [("--lambda", p.lambda), ("--k", p.k), ("--u", p.u), ("--g", p.g)] {
        v.push(name.into());
        v.push(value.to_string());
    }
    v
}

/// Counts straight from the definition: `λu(g−1)/2` factors, `λ(g−1)/2` per
/// part, and a factor on every vertex outside one part has `g(u−1)` edges.
fn counting_identity(p: &Params, d: &Decomposition) -> Result<(), String> {
    let total = (p.lambda * p.u * (p.g - 1) / 2) as usize;
    let per_hole = (p.lambda * (p.g - 1) / 2) as usize;
    let edges = (p.g * (p.u - 1)) as usize;
    if d.factors.len() != total {
        return Err(format!("{} factors, expected {total}", d.factors.len()));
    }
    let mut holes: BTreeMap<u32, usize> = BTreeMap::new();
    for (i, f) in d.factors.iter().enumerate() {
        let hole = f.hole.ok_or(format!("factor {i} has no hole"))?;
        *holes.entry(hole).or_default() += 1;
        let e: usize = f.cycles.iter().map(Cycle::len).sum();
        if e != edges {
            return Err(format!("factor {i} has {e} edges, expected {edges}"));
        }
        if f.cycles.iter().any(|c| c.len() != p.k as usize) {
            return Err(format!("factor {i} has a cycle of the wrong length"));
        }
    }
    if holes.len() != p.u as usize || holes.values().any(|&c| c != per_hole) {
        return Err(format!("hole counts {holes:?}, expected {per_hole} for each of {} parts", p.u));
    }
    Ok(())
}

fn pair_counts<'a>(cycles: impl IntoIterator<Item = &'a Cycle>) -> BTreeMap<(u32, u32), u32> {
    let mut counts = BTreeMap::new();
    for c in cycles {
        let vs = c.vertices();
        for i in 0..vs.len() {
            let (a, b) = (vs[i].part, vs[(i + 1) % vs.len()].part);
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}

fn all_pairs(n: u32, times: u32) -> BTreeMap<(u32, u32), u32> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| ((a, b), times))).collect()
}

/// `C_k × K_t` edge set from the definition, as unordered vertex pairs.
fn cycle_times_complete_edges(k: u32, t: u32) -> BTreeMap<(Vertex, Vertex), u32> {
    let mut edges = BTreeMap::new();
    for p in 0..k {
        let q = (p + 1) % k;
        for a in 0..t {
            for b in 0..t {
                if a != b {
                    let (x, y) = (Vertex::new(p, a), Vertex::new(q, b));
                    edges.insert((x.min(y), x.max(y)), 1);
                }
            }
        }
    }
    edges
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn criterion_1() -> Outcome {
    let mut checked = 0;
    let mut cells: Vec<Params> = END_TO_END.iter().map(|&t| params(t)).collect();
    for lambda in 1..=2 {
        for k in [4, 6, 8] {
            for u in 3..=13 {
                for g in 2..=8 {
                    cells.push(Params { lambda, k, u, g });
                }
            }
        }
    }
    for p in cells {
        if !matches!(check_feasibility(&p), Feasibility::Feasible(_)) {
            continue;
        }
        let d = build_arcs(&p).map_err(|e| format!("{p}: {e}"))?;
        counting_identity(&p, &d).map_err(|e| format!("{p}: {e}"))?;
        checked += 1;
    }
    Ok(format!("{checked} built instances"))
}

fn criterion_2() -> Outcome {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    for t in END_TO_END {
        let p = params(t);
        let file = cache.path().join("out.json");
        let mut args = param_args("build", &p);
        args.extend(["-o".into(), file.display().to_string()]);
        let start = Instant::now();
        let (code, _, err) = run(&args, cache.path());
        let elapsed = start.elapsed();
        if code != 0 {
            return Err(format!("{p}: exit {code}: {}", err.trim()));
        }
        if elapsed >= Duration::from_secs(10) {
            return Err(format!("{p}: {elapsed:?}"));
        }
        slowest = slowest.max(elapsed);
        let (code, _, err) = run(&["verify".into(), file.display().to_string()], cache.path());
        if code != 0 {
            return Err(format!("{p}: verify exit {code}: {}", err.trim()));
        }
    }
    Ok(format!("13 instances, slowest {slowest:.2?} with a cold cache"))
}

fn criterion_3() -> Outcome {
    let cases = [
        ((2, 4, 8, 4), OpenFamily::EvenU8),
        ((2, 4, 8, 8), OpenFamily::EvenU8),
        ((2, 4, 4, 4), OpenFamily::EvenK4U4x),
        ((2, 6, 6, 6), OpenFamily::HalfOddU4t2),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (t, family) in cases {
        let p = params(t);
        let found = check_feasibility(&p);
        if found != Feasibility::OpenException(family) {
            return Err(format!("{p}: {found}"));
        }
        let file = dir.path().join("never.json");
        let mut args = param_args("build", &p);
        args.extend(["-o".into(), file.display().to_string()]);
        let (code, _, err) = run(&args, dir.path());
        if code != 3 || file.exists() || !err.contains(&family.to_string()) {
            return Err(format!("{p}: exit {code}, file written {}, message {:?}", file.exists(), err.trim()));
        }
    }
    Ok("4 parameter sets gated, no files written".into())
}

fn criterion_4() -> Outcome {
    let cases = [
        ((1, 4, 5, 4), Condition::OddDegree),
        ((1, 4, 6, 3), Condition::Divisibility),
        ((2, 4, 2, 4), Condition::TooFewParts),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (t, condition) in cases {
        let p = params(t);
        let found = check_feasibility(&p);
        if found != Feasibility::Infeasible(condition) {
            return Err(format!("{p}: {found}"));
        }
        let (code, _, err) = run(&param_args("build", &p), dir.path());
        if code != 2 || !err.contains(&condition.to_string()) {
            return Err(format!("{p}: exit {code}, message {:?}", err.trim()));
        }
    }
    Ok("3 parameter sets rejected with the named condition".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    for t in &END_TO_END[..4] {
        let p = params(*t);
        let d = build_arcs(&p).map_err(|e| format!("{p}: {e}"))?;
        for trial in 0..1000 {
            let edit = common::EDITS[trial % common::EDITS.len()];
            if let Some(m) = common::mutate(&d, edit, p.u, p.g, &mut rng) {
                if verify_arcs(&m, &p).is_ok() {
                    return Err(format!("{p}: {edit:?} passed verification"));
                }
            }
            total += 1;
        }
    }
    Ok(format!("{total} mutations, 0 false passes"))
}

fn criterion_6() -> Outcome {
    for t in [(2, 4, 5, 2), (1, 4, 5, 3)] {
        let p = params(t);
        match brute_force_arcs(&p, 10_000_000) {
            BruteForce::Found(d) => verify_arcs(&d, &p).map_err(|v| format!("{p}: {v}"))?,
            other => return Err(format!("{p}: {other:?}")),
        }
    }
    Ok("both instances found within 10^7 nodes and verified".into())
}

fn criterion_7() -> Outcome {
    for u in (3..=15).step_by(2) {
        let near = near_one_factorization(u).map_err(|e| e.to_string())?;
        let mut counts = BTreeMap::new();
        for (m, f) in near.iter().enumerate() {
            let mut covered: Vec<u32> = f.edges.iter().flat_map(|&(a, b)| [a.part, b.part]).collect();
            covered.sort_unstable();
            if covered != (0..u).filter(|&x| x != m as u32).collect::<Vec<_>>() {
                return Err(format!("near-1-factor {m} of K_{u}"));
            }
            for &(a, b) in &f.edges {
                *counts.entry((a.part.min(b.part), a.part.max(b.part))).or_insert(0) += 1;
            }
        }
        if counts != all_pairs(u, 1) {
            return Err(format!("near-1-factorization of K_{u}"));
        }
    }
    for k in (4..=12).step_by(2) {
        let d = near_ck_factorization_kplus1_doubled(k).map_err(|e| e.to_string())?;
        if pair_counts(d.factors.iter().flat_map(|f| &f.cycles)) != all_pairs(k + 1, 2) {
            return Err(format!("near C_{k}-factorization of K_{}(2)", k + 1));
        }
    }
    for k in (6..=16).step_by(2) {
        let split = walecki_split(k).map_err(|e| e.to_string())?;
        let mut counts = pair_counts(split.hamilton.iter().chain([&split.last]));
        for &(a, b) in &split.matching {
            *counts.entry((a.part.min(b.part), a.part.max(b.part))).or_insert(0) += 1;
        }
        if counts != all_pairs(k, 1) {
            return Err(format!("Walecki split of K_{k}"));
        }
    }
    for (k, t) in [(4, 3), (6, 3), (4, 5)] {
        let d = ckt_factorization_cycle_times_t(k, t).map_err(|e| e.to_string())?;
        let mut edges = BTreeMap::new();
        for f in &d.factors {
            if f.cycles.len() != 1 || f.cycles[0].len() != (k * t) as usize {
                return Err(format!("C_{k} × K_{t}: factor is not a Hamilton cycle"));
            }
            for (a, b) in f.cycles[0].edges() {
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        if edges != cycle_times_complete_edges(k, t) {
            return Err(format!("C_{k} × K_{t}: edges differ from the product"));
        }
    }
    Ok("near-1-factorizations u ≤ 15, doubled K_{k+1} k ≤ 12, Walecki 6..16, C_k × K_t Hamilton".into())
}

fn criterion_8() -> Outcome {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    for t in [(2, 6, 4, 6), (1, 12, 5, 3), (2, 4, 5, 3)] {
        let p = params(t);
        let outputs: Vec<String> = (0..3)
            .map(|_| {
                let (code, out, _) = run(&param_args("build", &p), cache.path());
                if code == 0 {
                    Ok(out)
                } else {
                    Err(format!("{p}: exit {code}"))
                }
            })
            .collect::<Result<_, _>>()?;
        if outputs[1] != outputs[2] || outputs[0] != outputs[1] {
            return Err(format!("{p}: outputs differ"));
        }
        from_json(&outputs[2]).map_err(|e| format!("{p}: {e}"))?;
    }
    Ok("3 instances byte-identical across runs".into())
}

fn main() {
    let cache = tempfile::tempdir().expect("temporary cache directory");
    std::env::set_var("CYCLEFRAME_CACHE", cache.path());
    let criteria: [Criterion; 8] = [
        ("counting identity", criterion_1),
        ("end-to-end sweep", criterion_2),
        ("exception gating", criterion_3),
        ("necessity rejection", criterion_4),
        ("verifier soundness", criterion_5),
        ("oracle cross-check", criterion_6),
        ("block unit properties", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed (tolerance 0)", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
