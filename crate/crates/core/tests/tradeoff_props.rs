//! Randomised invariants of the trade-off solvers: closed forms stay in
//! range, feasible witnesses are confirmed by the dense oracle, and the
//! rank-1 reduction round-trips fidelities back to coefficients.

use std::collections::BTreeMap;

use clonetrade::bitstrings::BitString;
use clonetrade::gram::{build_g_ml, build_g_y};
use clonetrade::hilbert::{build_chi, fidelity_direct, ghz_phi};
use clonetrade::tradeoff::{
    beta_from_fidelities, one_to_n_relation_residual, rank1_reduction, residual_quadratics,
    solve_nminus1, success_probability, symmetric_fidelity, tradeoff_1_to_n, FidelityVector,
    Verdict,
};
use clonetrade::{Error, Rat};
use num_traits::One;
use proptest::prelude::*;

proptest! {
    #[test]
    fn symmetric_fidelity_lies_in_unit_interval(m in 1usize..=3, extra in 1usize..=3, l in 1usize..=6, d in 2usize..=4) {
        let n = m + extra;
        let l = l.min(n);
        let f = symmetric_fidelity(m, l, n, d).unwrap();
        prop_assert!(f > Rat::new(0.into(), 1.into()));
        prop_assert!(f <= Rat::one());
        // More sites constrained at once can only lower the optimum.
        if l > 1 {
            prop_assert!(f <= symmetric_fidelity(m, l - 1, n, d).unwrap());
        }
    }

    #[test]
    fn concavity_of_squared_root_sum(raw in prop::collection::vec(1e-9f64..1.0, 12), theta in 1e-9f64..1.0) {
        let n = raw.len() / 2;
        let f = |x: &[f64]| x.iter().map(|v| v.sqrt()).sum::<f64>().powi(2);
        let (x, z) = raw.split_at(n);
        let mix: Vec<f64> = x.iter().zip(z).map(|(a, b)| theta * a + (1.0 - theta) * b).collect();
        prop_assert!(f(&mix) >= theta * f(x) + (1.0 - theta) * f(z) - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nminus1_feasible_verdicts_are_witnessed(n in 3usize..=4, raw in prop::collection::vec(0.70f64..0.99, 4)) {
        let labels = BitString::enumerate_weight(n, n - 1).unwrap();
        let map: BTreeMap<BitString, f64> =
            labels.iter().copied().zip(raw.iter().copied()).collect();
        let targets = FidelityVector::from_f64(map).unwrap();
        let out = solve_nminus1(n, 2, &labels, &targets).unwrap();
        if out.verdict == Verdict::Feasible {
            // The witness is sub-normalised when the targets are interior;
            // the normalised machine must reach every target per the oracle.
            let beta = out.witness_beta.as_ref().unwrap();
            let phi = ghz_phi(1, 2).unwrap();
            let chi = build_chi(n - 1, n, 2, beta, &phi).unwrap();
            let norm2 = chi.norm().powi(2);
            prop_assert!(norm2 <= 1.0 + 1e-9);
            for (y, &t) in labels.iter().zip(raw.iter()) {
                let f = fidelity_direct(&chi, n - 1, n, 2, y).unwrap() / norm2;
                prop_assert!(f >= t - 1e-9, "target {t} at {y}, oracle {f}");
            }
        }
    }

    #[test]
    fn one_to_n_completion_lands_on_the_surface(known in prop::collection::vec(0.34f64..1.0, 2)) {
        // Completing N−1 single-site fidelities either lands exactly on the
        // trade-off surface or reports the targets unreachable.
        match tradeoff_1_to_n(3, 2, &known) {
            Ok(f3) => {
                prop_assert!((1.0 / 3.0 - 1e-9..=1.0 + 1e-9).contains(&f3));
                let full = [known[0], known[1], f3];
                prop_assert!(one_to_n_relation_residual(&full, 3, 2).abs() < 1e-8);
            }
            Err(Error::OutsideAchievableRegion) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn success_probability_is_at_least_uniform_routing(n in 2usize..=5, raw in prop::collection::vec(0.01f64..1.0, 5)) {
        let labels = BitString::enumerate_weight(n, 1).unwrap();
        let g0 = build_g_y(1, n, 2, &BitString::zeros(n)).unwrap();
        let mut beta: Vec<f64> = raw.iter().take(n).copied().collect();
        let form = g0.quad_form_f64(&beta).sqrt();
        for v in beta.iter_mut() {
            *v /= form;
        }
        let map: BTreeMap<BitString, f64> =
            labels.iter().copied().zip(beta.iter().copied()).collect();
        let p = success_probability(&map, 1, n, 2).unwrap();
        prop_assert!(p >= 1.0 / n as f64 - 1e-12);
    }

    #[test]
    fn rank1_roundtrip_recovers_beta(l in 1usize..=2, raw in prop::collection::vec(0.05f64..1.0, 4)) {
        let red = rank1_reduction(4, 2, l).unwrap();
        let g0 = build_g_y(1, 4, 2, &BitString::zeros(4)).unwrap();
        // String order is the site order reversed.
        let mut b_str: Vec<f64> = raw.iter().rev().copied().collect();
        let form = g0.quad_form_f64(&b_str).sqrt();
        for v in b_str.iter_mut() {
            *v /= form;
        }
        let beta_sites: Vec<f64> = b_str.iter().rev().copied().collect();
        let mut targets = BTreeMap::new();
        for y in BitString::enumerate_weight(4, l).unwrap() {
            let g = build_g_ml(1, 4, 2, l, &y).unwrap();
            targets.insert(y, g.quad_form_f64(&b_str));
        }
        let rec = beta_from_fidelities(&red, &targets).unwrap();
        for (r, orig) in rec.iter().zip(&beta_sites) {
            prop_assert!((r - orig).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_quadratics_vanish_for_single_input(raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        // For M = 1 every machine satisfies the cross-label quadratic
        // identities; the residual is numerically zero.
        let r = residual_quadratics(&raw, 2, 2, (0, 1, 2, 3)).unwrap();
        prop_assert!(r.abs() < 1e-9);
    }
}
