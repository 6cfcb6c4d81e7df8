//! Property tests over random parameter sets and random edits.

mod common;

use cycleframe::arcs::{build_arcs, check_feasibility, expected_counts, Condition, Feasibility, Params, PrimeSplit};
use cycleframe::io::{from_json, to_json};
use cycleframe::verify::verify_arcs;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The necessary conditions restated from the definition of a k-ARCS.
fn necessary_oracle(p: &Params) -> bool {
    p.k >= 4
        && p.k % 2 == 0
        && p.lambda >= 1
        && p.u >= 3
        && p.g >= 2
        && (p.lambda * (p.g - 1)) % 2 == 0
        && (p.g * (p.u - 1)) % p.k == 0
}

fn small_params() -> impl Strategy<Value = Params> {
    (1u32..=4, prop::sample::select(vec![4u32, 6, 8, 10, 12]), 3u32..=17, 2u32..=16)
        .prop_map(|(lambda, k, u, g)| Params { lambda, k, u, g })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn infeasible_exactly_when_necessity_fails(p in small_params()) {
        let infeasible = matches!(check_feasibility(&p), Feasibility::Infeasible(_));
        prop_assert_eq!(infeasible, !necessary_oracle(&p));
    }

    #[test]
    fn feasible_cells_build_and_verify(p in small_params()) {
        if let Feasibility::Feasible(_) = check_feasibility(&p) {
            let d = build_arcs(&p).unwrap();
            prop_assert_eq!(verify_arcs(&d, &p), Ok(()));
            let (total, per_hole, edges) = expected_counts(&p);
            prop_assert_eq!(d.len() as u64, total);
            for part in 0..p.u {
                prop_assert_eq!(d.factors.iter().filter(|f| f.hole == Some(part)).count() as u64, per_hole);
            }
            prop_assert!(d.factors.iter().all(|f| f.edge_count() as u64 == edges));
            prop_assert_eq!(d.provenance.len(), d.factors.len());
        }
    }

    #[test]
    fn json_round_trip(p in small_params()) {
        if let Feasibility::Feasible(_) = check_feasibility(&p) {
            let d = build_arcs(&p).unwrap();
            let text = to_json(&d, &p);
            let (p2, d2) = from_json(&text).unwrap();
            prop_assert_eq!(p2, p);
            prop_assert_eq!(&d2, &d);
            prop_assert_eq!(to_json(&d2, &p2), text);
        }
    }

    #[test]
    fn single_edits_are_caught(seed in any::<u64>(), which in 0usize..4, edit in 0usize..common::EDITS.len()) {
        let p = [Params::new(2, 4, 5, 2), Params::new(1, 4, 5, 3), Params::new(2, 6, 3, 6), Params::new(2, 6, 4, 6)][which];
        let d = build_arcs(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(m) = common::mutate(&d, common::EDITS[edit], p.u, p.g, &mut rng) {
            prop_assert!(verify_arcs(&m, &p).is_err());
        }
    }

    #[test]
    fn prime_splits_factor_k(k in 4u32..200) {
        for sp in PrimeSplit::all(k) {
            prop_assert_eq!(sp.r * sp.s, k);
            prop_assert_eq!(sp.primes.iter().product::<u32>(), k);
            prop_assert_eq!(sp.primes[..sp.cut].iter().product::<u32>(), sp.r);
            prop_assert!(sp.cut >= 1 && sp.cut < sp.total());
        }
    }
}

#[test]
fn lambda_scaling_counts() {
    // λ = 3 combines the λ = 1 and λ = 2 solutions.
    let p = Params::new(3, 4, 5, 3);
    let d = build_arcs(&p).unwrap();
    assert_eq!(d.len(), 15);
    assert_eq!(verify_arcs(&d, &p), Ok(()));
    assert_eq!(d.provenance.iter().filter(|t| t.as_str() == "case a").count(), 5);
    // λ = 4 repeats the λ = 2 solution.
    let p = Params::new(4, 4, 5, 2);
    let d = build_arcs(&p).unwrap();
    assert_eq!(d.len(), 10);
    assert_eq!(verify_arcs(&d, &p), Ok(()));
}

#[test]
fn named_conditions() {
    assert_eq!(Condition::OddDegree.to_string(), "λ(g−1) must be even");
    assert_eq!(check_feasibility(&Params::new(1, 4, 3, 2)), Feasibility::Infeasible(Condition::OddDegree));
}
