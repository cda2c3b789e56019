//! Randomised cross-checks between the dense Hilbert-space layer and the
//! exact Gram forms: every quadratic-form identity the solvers rely on is
//! re-derived here by explicit tensor computation.

use std::collections::BTreeMap;

use clonetrade::bitstrings::BitString;
use clonetrade::gram::build_g_y;
use clonetrade::hilbert::{
    build_chi, build_r, fidelity_direct, ghz_phi, max_eig, partial_transpose, sym_projector,
};
use proptest::prelude::*;

/// Problem sizes small enough for the dense oracle to stay instant.
const TUPLES: [(usize, usize, usize); 4] = [(1, 2, 2), (1, 3, 2), (2, 3, 2), (1, 2, 3)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chi_norm_equals_g0_form(which in 0usize..TUPLES.len(), raw in prop::collection::vec(-1.0f64..1.0, 6)) {
        let (m, n, d) = TUPLES[which];
        let labels = BitString::enumerate_weight(n, m).unwrap();
        let beta: Vec<f64> = raw.iter().take(labels.len()).copied().collect();
        let map: BTreeMap<BitString, f64> = labels.iter().copied().zip(beta.iter().copied()).collect();
        let phi = ghz_phi(n - m, d).unwrap();
        let chi = build_chi(m, n, d, &map, &phi).unwrap();
        let g0 = build_g_y(m, n, d, &BitString::zeros(n)).unwrap();
        prop_assert!((chi.norm().powi(2) - g0.quad_form_f64(&beta)).abs() < 1e-10);
    }

    #[test]
    fn fidelity_direct_equals_gram_form(which in 0usize..TUPLES.len(), raw in prop::collection::vec(-1.0f64..1.0, 6), idx in 0usize..100) {
        let (m, n, d) = TUPLES[which];
        let labels = BitString::enumerate_weight(n, m).unwrap();
        let beta: Vec<f64> = raw.iter().take(labels.len()).copied().collect();
        let map: BTreeMap<BitString, f64> = labels.iter().copied().zip(beta.iter().copied()).collect();
        let phi = ghz_phi(n - m, d).unwrap();
        let chi = build_chi(m, n, d, &map, &phi).unwrap();
        let y = labels[idx % labels.len()];
        let g = build_g_y(m, n, d, &y).unwrap();
        prop_assert!((fidelity_direct(&chi, m, n, d, &y).unwrap() - g.quad_form_f64(&beta)).abs() < 1e-10);
    }

    #[test]
    fn max_eig_dominates_rayleigh_quotients(raw in prop::collection::vec(0.01f64..1.0, 3), probe in prop::collection::vec(-1.0f64..1.0, 16)) {
        let s: f64 = raw.iter().sum();
        let labels = BitString::enumerate_weight(3, 1).unwrap();
        let weights: BTreeMap<BitString, f64> =
            labels.iter().copied().zip(raw.iter().map(|a| a / s)).collect();
        let r = build_r(1, 3, 2, &weights).unwrap();
        let (lambda, _) = max_eig(&r.op).unwrap();
        let norm2: f64 = probe.iter().map(|v| v * v).sum();
        prop_assume!(norm2 > 1e-6);
        let amp: Vec<num_complex::Complex64> =
            probe.iter().map(|&v| num_complex::Complex64::new(v, 0.0)).collect();
        let quot = r.op.mat.quad_form(&amp).re / norm2;
        prop_assert!(lambda >= quot - 1e-9);
    }

    #[test]
    fn projector_is_idempotent(n in 1usize..=4, d in 2usize..=3) {
        prop_assume!(d.pow(n as u32) <= 81);
        let p = sym_projector(n, d).unwrap();
        let sq = p.mat.matmul(&p.mat);
        prop_assert!(sq.max_abs_diff(&p.mat) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_involutive(n in 2usize..=3, d in 2usize..=3, site in 0usize..3) {
        let p = sym_projector(n, d).unwrap();
        let mask = BitString::from_sites(n, &[site % n]).unwrap();
        let once = partial_transpose(&p, &mask).unwrap();
        let twice = partial_transpose(&once, &mask).unwrap();
        prop_assert!(twice.mat.max_abs_diff(&p.mat) < 1e-14);
    }
}
