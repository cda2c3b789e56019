//! Numbered acceptance checks spanning the whole crate: the exact closed
//! forms, the dense oracle, the solvers, and the `2→4` case study. Each
//! check produces a [`CriterionReport`] with a pass/fail flag and evidence
//! lines; the CLI `verify` subcommand prints one line per criterion.
//!
//! Two criteria pin published case-study values that the dense oracle
//! contradicts: the symmetric pair optimum `61/69` (criterion 3) and the
//! oracle closure of class-2 witnesses (criterion 11). Those reports fail
//! by construction and carry the computed counter-evidence; see
//! [`crate::two_to_four`] for the two-layer analysis.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstrings::{binom_rat, binom_usize, BitString};
use crate::gram::{build_g_ml, build_g_y, g0_inverse, g0_spectrum};
use crate::hilbert::{
    bell_state, build_chi, build_psi_x, build_r, commutator_check, eta_norm_check, fidelity_direct,
    ghz_phi, lieb_mattis_check, max_eig, partial_transpose, phi_trace_check, sym_projector,
    DenseState,
};
use crate::tradeoff::{
    general_fidelity, kernel_x, one_to_n_relation_residual, solve_nminus1, success_probability,
    symmetric_fidelity, tradeoff_1_to_n, wang_formula, FidelityVector, Verdict,
};
use crate::two_to_four::{
    beta_from_reduced, class2_relation, class2_witness, printed_symmetric_optimum,
    reference_pencil_bound, reference_symmetric_optimum, region_membership, PairFidelities,
};
use crate::{CplxMatrix, Error, Matrix, Rat, Result};

/// Outcome of one numbered acceptance check.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub number: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Evidence lines: what was computed, against which tolerance, and for
    /// failing checks the counter-evidence.
    pub details: Vec<String>,
}

impl CriterionReport {
    fn new(number: usize, name: &'static str) -> Self {
        Self {
            number,
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    fn fail(&mut self, line: impl Into<String>) {
        self.passed = false;
        self.details.push(line.into());
    }

    /// One-line summary, as printed by the CLI.
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} {} — {}",
            self.number,
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )
    }
}

/// Run one numbered check (1–12).
pub fn run_criterion(number: usize) -> Result<CriterionReport> {
    match number {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => Err(Error::InvalidArgument(format!(
            "no acceptance criterion numbered {number}; valid numbers are 1..=12"
        ))),
    }
}

/// Run every check in order.
pub fn run_all() -> Result<Vec<CriterionReport>> {
    (1..=12).map(run_criterion).collect()
}

/// Quick oracle cross-check used by `verify --scope fast`: dominant
/// eigenvalue of the uniform-weight Choi operator against the closed-form
/// symmetric fidelity at three small sizes.
pub fn run_fast() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(0, "fast oracle cross-check");
    for (m, n, d) in [(1usize, 2usize, 2usize), (1, 3, 2), (2, 3, 2)] {
        let (lambda, dev) = oracle_vs_symmetric(m, n, d, 1)?;
        let sym = symmetric_fidelity(m, 1, n, d)?;
        let line = format!(
            "(M={m},N={n},d={d},L=1): λ_max = {:.12}, closed form {} = {:.12}, |Δ| = {:.2e}",
            lambda,
            sym,
            sym.to_f64().unwrap(),
            dev
        );
        if dev <= 1e-8 {
            rep.note(line);
        } else {
            rep.fail(line);
        }
    }
    Ok(rep)
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Dominant eigenvalue of `R` with uniform weights over weight-`l` labels,
/// and its deviation from the closed-form symmetric fidelity.
fn oracle_vs_symmetric(m: usize, n: usize, d: usize, l: usize) -> Result<(f64, f64)> {
    let labels = BitString::enumerate_weight(n, l)?;
    let a = 1.0 / labels.len() as f64;
    let weights: BTreeMap<BitString, f64> = labels.into_iter().map(|y| (y, a)).collect();
    let r = build_r(m, n, d, &weights)?;
    let (lambda, _) = max_eig(&r.op)?;
    let sym = symmetric_fidelity(m, l, n, d)?.to_f64().unwrap();
    Ok((lambda, (lambda - sym).abs()))
}

// ---------------------------------------------------------------------------
// 1. closed-form symmetric fidelities
// ---------------------------------------------------------------------------

fn criterion_1() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(1, "closed-form symmetric fidelities");
    let mut points = 0usize;
    for d in [2usize, 3, 4] {
        for n in 2..=6usize {
            for m in 1..n {
                for l in 1..=n {
                    // `symmetric_fidelity` evaluates two independent closed
                    // forms and errors if they disagree.
                    let f = symmetric_fidelity(m, l, n, d)?;
                    points += 1;
                    if l == 1 {
                        let (mi, ni, di) = (m as i64, n as i64, d as i64);
                        let single = rat(mi, ni) + rat((ni - mi) * (mi + 1), ni * (mi + di));
                        if f != single {
                            rep.fail(format!(
                                "single-site closed form mismatch at (M={m},N={n},d={d}): {f} vs {single}"
                            ));
                        }
                    }
                    if l == n {
                        let global = binom_rat((m + d - 1) as i64, m as i64)
                            / binom_rat((n + d - 1) as i64, n as i64);
                        if f != global {
                            rep.fail(format!(
                                "global closed form mismatch at (M={m},N={n},d={d}): {f} vs {global}"
                            ));
                        }
                    }
                }
            }
        }
    }
    if rep.passed {
        rep.note(format!(
            "{points} grid points (1 ≤ M < N ≤ 6, 1 ≤ L ≤ N, d ∈ {{2,3,4}}): \
             the two closed forms agree exactly; L = 1 and L = N specialise \
             to the single-site and global formulas exactly"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 2. alternative summation formula
// ---------------------------------------------------------------------------

fn criterion_2() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(2, "alternative summation formula");
    let mut points = 0usize;
    let mut mismatches: Vec<String> = Vec::new();
    for d in [2usize, 3, 4] {
        for n in 2..=6usize {
            for m in 1..n {
                for l in 1..=n {
                    let f = symmetric_fidelity(m, l, n, d)?;
                    let w = wang_formula(m, l, n, d)?;
                    points += 1;
                    if f != w {
                        mismatches.push(format!("(M={m},L={l},N={n},d={d}): {f} vs {w}"));
                    }
                }
            }
        }
    }
    if mismatches.is_empty() {
        rep.note(format!(
            "alternative summation agrees exactly with the symmetric closed form \
             at all {points} grid points"
        ));
    } else {
        // Divergence is acceptable if documented; equality is only claimed
        // beyond special cases and numerical tests.
        rep.note(format!(
            "alternative summation diverges at {} of {points} grid points \
             (documented counterexamples follow; both evaluations are exact \
             and reproducible):",
            mismatches.len()
        ));
        for line in mismatches.iter().take(8) {
            rep.note(format!("  {line}"));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 3. dense-oracle equivalence
// ---------------------------------------------------------------------------

fn criterion_3() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(3, "dense-oracle equivalence");
    // (M, N, d, L)
    for (m, n, d, l) in [
        (1usize, 2usize, 2usize, 1usize),
        (1, 3, 2, 1),
        (2, 3, 2, 1),
        (1, 2, 3, 1),
        (2, 4, 2, 2),
    ] {
        let (lambda, dev) = oracle_vs_symmetric(m, n, d, l)?;
        let sym = symmetric_fidelity(m, l, n, d)?;
        let line = format!(
            "(M={m},N={n},d={d},L={l}): λ_max = {:.12}, closed form {} = {:.12}, |Δ| = {:.2e}",
            lambda,
            sym,
            sym.to_f64().unwrap(),
            dev
        );
        if dev <= 1e-8 {
            rep.note(format!("{line} — agrees within 1e-8"));
        } else {
            rep.fail(format!("{line} — disagrees"));
        }
    }
    // The published symmetric pair optimum for (2,4,2,2) is 61/69; the
    // oracle and the exact Gram forms both give 23/30 instead, and the
    // complement-averaged pencil bound shows 61/69 is unattainable.
    let published = printed_symmetric_optimum();
    let reference = reference_symmetric_optimum();
    let bound = reference_pencil_bound()?;
    rep.fail(format!(
        "published value check: the (2,4,2,2) optimum is quoted as {} ≈ {:.6}, \
         but the oracle eigenvalue and the exact Gram forms give {} ≈ {:.6}",
        published,
        published.to_f64().unwrap(),
        reference,
        reference.to_f64().unwrap()
    ));
    rep.note(format!(
        "  operator bound: λ_max of the complement-averaged pencil is \
         (11+√21)/20 = {:.12}, strictly below {} ≈ {:.6}, so the published \
         value is unattainable by any normalised machine",
        bound,
        published,
        published.to_f64().unwrap()
    ));
    rep.note(
        "  the published reduced matrices follow the entry rule \
         1/C(N+d−1−x·z+w, d−1); the oracle-backed Gram forms use \
         1/C(M+d−1−x·z+w, d−1) — see the two-layer case-study module"
            .to_string(),
    );
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 4. 1→N trade-off surface
// ---------------------------------------------------------------------------

fn criterion_4() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(4, "1→N trade-off surface");
    let mut rng = ChaCha8Rng::seed_from_u64(4001);
    let labels = BitString::enumerate_weight(3, 1)?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut alpha: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = alpha.iter().sum();
        for a in alpha.iter_mut() {
            *a /= s;
        }
        for d in [2usize, 3] {
            let weights: BTreeMap<BitString, f64> =
                labels.iter().copied().zip(alpha.iter().copied()).collect();
            let r = build_r(1, 3, d, &weights)?;
            let (_, vec) = max_eig(&r.op)?;
            let mut fids = Vec::with_capacity(3);
            for y in &labels {
                fids.push(fidelity_direct(&vec, 1, 3, d, y)?);
            }
            let res = one_to_n_relation_residual(&fids, 3, d).abs();
            worst = worst.max(res);
            if res >= 1e-7 {
                rep.fail(format!(
                    "surface relation violated at α = {alpha:?}, d = {d}: residual {res:.3e}"
                ));
            }
        }
    }
    if rep.passed {
        rep.note(format!(
            "50 random weight vectors at N = 3, d ∈ {{2,3}}: dominant-eigenvector \
             fidelities satisfy the surface relation, worst residual {worst:.2e} < 1e-7"
        ));
    }
    let f2 = tradeoff_1_to_n(2, 2, &[1.0])?;
    if (f2 - 0.5).abs() <= 1e-12 {
        rep.note(format!(
            "endpoint: F_1 = 1 at N = 2, d = 2 forces F_2 = {f2:.12} = 1/2"
        ));
    } else {
        rep.fail(format!(
            "endpoint: F_1 = 1 gave F_2 = {f2:.12}, expected 1/2"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 5. N−1→N solver
// ---------------------------------------------------------------------------

fn criterion_5() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(5, "N−1→N solver");
    for n in [3usize, 4, 5] {
        for d in [2usize, 3] {
            let boundary = Rat::one() - rat((d - 1) as i64, (n * (n + d - 1)) as i64);
            if boundary != symmetric_fidelity(n - 1, 1, n, d)? {
                rep.fail(format!(
                    "symmetric boundary at (N={n},d={d}) is not the closed-form fidelity"
                ));
                continue;
            }
            let labels = BitString::enumerate_weight(n, 1)?;
            let b = boundary.to_f64().unwrap();
            for (bump, expect) in [(0.0, Verdict::Feasible), (1e-3, Verdict::Infeasible)] {
                let map: BTreeMap<BitString, f64> = labels.iter().map(|y| (*y, b + bump)).collect();
                let targets = FidelityVector::from_f64(map)?;
                let out = solve_nminus1(n, d, &labels, &targets)?;
                if out.verdict != expect {
                    rep.fail(format!(
                        "(N={n},d={d}) symmetric target {:.9}+{bump}: got {}, expected {expect}",
                        b, out.verdict
                    ));
                }
            }
        }
    }
    if rep.passed {
        rep.note(
            "symmetric target 1 − (d−1)/(N(N+d−1)) is Feasible at the boundary and \
             Infeasible at +1e-3 for N ∈ {3,4,5}, d ∈ {2,3} (boundary value exact in rationals)",
        );
    }

    // General-fidelity map against the oracle at (N=3, d=2): subset
    // fidelities of any 2→3 machine are an affine function of the
    // single-site ones.
    let mut rng = ChaCha8Rng::seed_from_u64(5001);
    let labels2 = BitString::enumerate_weight(3, 2)?;
    let g0 = build_g_y(2, 3, 2, &BitString::zeros(3))?;
    let phi = ghz_phi(1, 2)?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let mut beta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
        let form = g0.quad_form_f64(&beta);
        for v in beta.iter_mut() {
            *v /= form.sqrt();
        }
        let map: BTreeMap<BitString, f64> =
            labels2.iter().copied().zip(beta.iter().copied()).collect();
        let chi = build_chi(2, 3, 2, &map, &phi)?;
        let mut f_sites = Vec::with_capacity(3);
        for k in 0..3 {
            let y = BitString::from_sites(3, &[k])?;
            f_sites.push(fidelity_direct(&chi, 2, 3, 2, &y)?);
        }
        let mut checks: Vec<BitString> = labels2.clone();
        checks.push(BitString::from_sites(3, &[0, 1, 2])?);
        for y in &checks {
            let mapped = general_fidelity(&f_sites, y)?;
            let direct = fidelity_direct(&chi, 2, 3, 2, y)?;
            let dev = (mapped - direct).abs();
            worst = worst.max(dev);
            if dev >= 1e-8 {
                rep.fail(format!(
                    "general map mismatch at y = {y}: affine {mapped:.12} vs oracle {direct:.12}"
                ));
            }
        }
    }
    if rep.passed {
        rep.note(format!(
            "general map F_y = y·F − w_y + 1 matches the oracle at (N=3, d=2) \
             on 5 random machines, worst |Δ| = {worst:.2e} < 1e-8"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 6. G_0 spectra and exact inverse
// ---------------------------------------------------------------------------

fn criterion_6() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(6, "G_0 spectra and exact inverse");
    let mut tuples = 0usize;
    let mut worst_val = 0.0f64;
    for d in [2usize, 3] {
        for m in 1..=4usize {
            for n in (m + 1)..=8usize {
                tuples += 1;
                let g0 = build_g_y(m, n, d, &BitString::zeros(n))?;
                let size = g0.size();
                let spectrum = g0_spectrum(m, n, d)?;
                if spectrum.total_degeneracy() != size {
                    rep.fail(format!(
                        "(M={m},N={n},d={d}): degeneracies sum to {} ≠ matrix size {size}",
                        spectrum.total_degeneracy()
                    ));
                    continue;
                }
                // Sorted eigenvalue lists must agree elementwise.
                let mut exact: Vec<f64> =
                    spectrum.expand().iter().map(|r| r.to_f64().unwrap()).collect();
                exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let (mut dense, _) = g0.entries.to_f64().sym_eigen();
                dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (e, v) in exact.iter().zip(&dense) {
                    let dev = (e - v).abs();
                    worst_val = worst_val.max(dev);
                    if dev > 1e-10 {
                        rep.fail(format!(
                            "(M={m},N={n},d={d}): eigenvalue {e:.12} vs dense {v:.12}, |Δ| = {dev:.2e}"
                        ));
                    }
                }
                // Degeneracies, exactly: count dense eigenvalues in a window
                // around each distinct closed-form value. The windows are
                // unambiguous as long as distinct values are well separated.
                let mut merged: Vec<(Rat, usize)> = Vec::new();
                for (val, &deg) in spectrum.eigenvalues.iter().zip(&spectrum.degeneracies) {
                    match merged.iter_mut().find(|(v, _)| v == val) {
                        Some((_, g)) => *g += deg,
                        None => merged.push((val.clone(), deg)),
                    }
                }
                let centers: Vec<f64> = merged.iter().map(|(v, _)| v.to_f64().unwrap()).collect();
                for (i, a) in centers.iter().enumerate() {
                    for b in centers.iter().skip(i + 1) {
                        if (a - b).abs() < 3e-7 {
                            rep.fail(format!(
                                "(M={m},N={n},d={d}): distinct closed-form eigenvalues \
                                 within the matching window"
                            ));
                        }
                    }
                }
                for ((_, deg), center) in merged.iter().zip(&centers) {
                    let count = dense.iter().filter(|v| (*v - center).abs() < 1e-7).count();
                    if count != *deg {
                        rep.fail(format!(
                            "(M={m},N={n},d={d}): eigenvalue {center:.9} has dense \
                             multiplicity {count}, closed form says {deg}"
                        ));
                    }
                }
                // Closed-form inverse, exactly.
                let inv = g0_inverse(m, n, d)?;
                if g0.entries.matmul(&inv.entries) != Matrix::identity(size) {
                    rep.fail(format!(
                        "(M={m},N={n},d={d}): G_0^(-1) · G_0 ≠ I in exact arithmetic"
                    ));
                }
            }
        }
    }
    if rep.passed {
        rep.note(format!(
            "{tuples} tuples (M ≤ 4, M < N ≤ 8, d ∈ {{2,3}}): closed-form spectra match \
             dense eigendecompositions, worst value deviation {worst_val:.2e} < 1e-10, \
             all degeneracies exact, and G_0^(-1)·G_0 = I exactly"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 7. kernel consistency conditions
// ---------------------------------------------------------------------------

fn criterion_7() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(7, "kernel consistency conditions");
    for (m, l, n) in [(1usize, 3usize, 6usize), (1, 2, 5)] {
        let k = kernel_x(m, l, n)?;
        let expect_dim = binom_usize(n, l) - k.rank;
        if k.kernel.len() != expect_dim {
            rep.fail(format!(
                "(M={m},L={l},N={n}): kernel dimension {} ≠ C(N,L) − rank = {expect_dim}",
                k.kernel.len()
            ));
            continue;
        }
        let mut exact = true;
        for d in [2usize, 3] {
            for v in &k.kernel {
                let mut total: Option<Matrix<Rat>> = None;
                for (coef, y) in v.iter().zip(&k.cols) {
                    if coef.is_zero() {
                        continue;
                    }
                    let g = build_g_ml(m, n, d, l, y)?.entries.scale(coef);
                    total = Some(match total {
                        None => g,
                        Some(t) => t.add(&g),
                    });
                }
                if let Some(t) = total {
                    if t.max_abs() != 0.0 {
                        exact = false;
                        rep.fail(format!(
                            "(M={m},L={l},N={n}), d={d}: kernel vector does not \
                             annihilate the aggregated Gram matrices exactly"
                        ));
                    }
                }
            }
        }
        if exact {
            rep.note(format!(
                "(M={m},L={l},N={n}): kernel dimension {} = C({n},{l}) − rank({}); \
                 all kernel vectors annihilate the aggregated Gram matrices \
                 exactly for d ∈ {{2,3}}",
                k.kernel.len(),
                k.rank
            ));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 8. dominant-eigenvector nonnegativity
// ---------------------------------------------------------------------------

fn criterion_8() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(8, "dominant-eigenvector nonnegativity");
    let mut rng = ChaCha8Rng::seed_from_u64(8001);
    for m in [1usize, 2] {
        let labels = BitString::enumerate_weight(3, 1)?;
        for _ in 0..20 {
            let mut alpha: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = alpha.iter().sum();
            for a in alpha.iter_mut() {
                *a /= s;
            }
            let weights: BTreeMap<BitString, f64> =
                labels.iter().copied().zip(alpha.iter().copied()).collect();
            let r = build_r(m, 3, 2, &weights)?;
            if !lieb_mattis_check(&r)? {
                rep.fail(format!(
                    "M={m}→3, d=2, α = {alpha:?}: a dominant block eigenvector has \
                     an amplitude below -1e-10 after phase fixing"
                ));
            }
        }
    }
    if rep.passed {
        rep.note(
            "20 random weight vectors each for 1→3 and 2→3 at d = 2: every dominant \
             block eigenvector is entrywise ≥ -1e-10 after phase fixing",
        );
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 9. achievability of special states
// ---------------------------------------------------------------------------

fn criterion_9() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(9, "achievability of special states");
    if phi_trace_check(&ghz_phi(3, 2)?, 1)? {
        rep.note("GHZ state on 3 qubits traces to the maximally mixed single site (M=1, N=4)");
    } else {
        rep.fail("GHZ state on 3 qubits failed the reduced-trace check");
    }

    // (|00>W + W|00> + |11>|11>)/√3 with W = (|01>+|10>)/√2: its two-site
    // reduction is maximally mixed on the symmetric subspace (M=2, N=6).
    let s = 1.0 / 2f64.sqrt();
    let w: [f64; 4] = [0.0, s, s, 0.0];
    let e00: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
    let e11: [f64; 4] = [0.0, 0.0, 0.0, 1.0];
    let mut amp = vec![0.0f64; 16];
    for i in 0..4 {
        for j in 0..4 {
            amp[i * 4 + j] += (e00[i] * w[j] + w[i] * e00[j] + e11[i] * e11[j]) / 3f64.sqrt();
        }
    }
    let phi = DenseState::from_real(vec![2; 4], &amp)?;
    if phi_trace_check(&phi, 2)? {
        rep.note(
            "the 1/√3 four-qubit state traces to the maximally mixed two-site state (M=2, N=6)",
        );
    } else {
        rep.fail("the 1/√3 four-qubit state failed the reduced-trace check");
    }

    let mut z = vec![0.0f64; 8];
    z[0] = 1.0;
    let zero_state = DenseState::from_real(vec![2; 3], &z)?;
    if !phi_trace_check(&zero_state, 1)? {
        rep.note("|000⟩ is rejected, as required");
    } else {
        rep.fail("|000⟩ unexpectedly passed the reduced-trace check");
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 10. projector-lemma numerics
// ---------------------------------------------------------------------------

fn criterion_10() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(10, "projector-lemma numerics");

    // η normalisation at (M,N) ∈ {(1,2),(2,3),(2,4)}, d = 2, for every pair
    // of weight-M labels.
    let mut worst_eta = 0.0f64;
    for (m, n) in [(1usize, 2usize), (2, 3), (2, 4)] {
        let labels = BitString::enumerate_weight(n, m)?;
        for x in &labels {
            for y in &labels {
                let v = eta_norm_check(m, n, 2, x, y)?;
                let dev = (v - 1.0).abs();
                worst_eta = worst_eta.max(dev);
                if dev > 1e-10 {
                    rep.fail(format!(
                        "η norm at (M={m},N={n}), x={x}, y={y}: {v:.12} ≠ 1"
                    ));
                }
            }
        }
    }
    if worst_eta <= 1e-10 {
        rep.note(format!(
            "η norms equal 1 at (M,N) ∈ {{(1,2),(2,3),(2,4)}}, d = 2, worst \
             deviation {worst_eta:.2e} ≤ 1e-10"
        ));
    }

    // Inner products of the ψ_x states against the closed form
    // 1/C(M − x·z + d − 1, d − 1), dense construction.
    let mut worst_ip = 0.0f64;
    for (m, n, d) in [(2usize, 4usize, 2usize), (1, 3, 3)] {
        let phi = ghz_phi(n - m, d)?;
        let labels = BitString::enumerate_weight(n, m)?;
        for x in &labels {
            let px = build_psi_x(m, n, d, x, &phi)?;
            for z in &labels {
                let pz = build_psi_x(m, n, d, z, &phi)?;
                let ip = px.inner(&pz)?.re;
                let k = x.dot(z)? as i64;
                let expect = binom_rat((m as i64) - k + (d as i64) - 1, (d as i64) - 1)
                    .to_f64()
                    .unwrap()
                    .recip();
                let dev = (ip - expect).abs();
                worst_ip = worst_ip.max(dev);
                if dev > 1e-10 {
                    rep.fail(format!(
                        "inner product at (M={m},N={n},d={d}), x={x}, z={z}: \
                         {ip:.12} vs closed form {expect:.12}"
                    ));
                }
            }
        }
    }
    if worst_ip <= 1e-10 {
        rep.note(format!(
            "ψ_x inner products match 1/C(M−x·z+d−1, d−1) at (2,4,2) and (1,3,3), \
             worst deviation {worst_ip:.2e}"
        ));
    }

    // Commutation of the weighted projector sums with the symmetrisers.
    let mut worst_comm = 0.0f64;
    for w in [1usize, 2] {
        for d in [2usize, 3] {
            let c = commutator_check(1, w, d)?;
            worst_comm = worst_comm.max(c);
            if c >= 1e-10 {
                rep.fail(format!(
                    "commutator at (M=1, w={w}, d={d}): {c:.2e} ≥ 1e-10"
                ));
            }
        }
    }
    if worst_comm < 1e-10 {
        rep.note(format!(
            "projector commutators vanish at (M=1, w ∈ {{1,2}}, d ∈ {{2,3}}), \
             worst residual {worst_comm:.2e}"
        ));
    }

    // Twirling identity: the partial transpose of the rescaled two-site
    // symmetriser equals I/(d(d+1)) + |B⟩⟨B|/(d+1) entrywise.
    let mut worst_twirl = 0.0f64;
    for d in [2usize, 3] {
        let p = sym_projector(2, d)?;
        let scaled = p.scale(2.0 / (d * (d + 1)) as f64);
        let mask = BitString::from_sites(2, &[1])?;
        let lhs = partial_transpose(&scaled, &mask)?;
        let b = bell_state(d)?;
        let dim = d * d;
        let mut rhs = CplxMatrix::zeros(dim, dim);
        for i in 0..dim {
            rhs[(i, i)] = Complex64::new(1.0 / (d * (d + 1)) as f64, 0.0);
            for j in 0..dim {
                rhs[(i, j)] += b.amp[i] * b.amp[j].conj() / (d + 1) as f64;
            }
        }
        let dev = lhs.mat.max_abs_diff(&rhs);
        worst_twirl = worst_twirl.max(dev);
        if dev >= 1e-12 {
            rep.fail(format!(
                "twirling identity at d={d}: entrywise deviation {dev:.2e}"
            ));
        }
    }
    if worst_twirl < 1e-12 {
        rep.note(format!(
            "twirling identity holds entrywise at d ∈ {{2,3}}, worst deviation {worst_twirl:.2e}"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 11. 2→4 case-study closure
// ---------------------------------------------------------------------------

/// Follow the ray from `start` towards `(1,1,1)` until the class-2 residual
/// changes sign, then bisect. `None` when no root lies on the ray.
fn class2_ray_root(start: [f64; 3]) -> Option<PairFidelities> {
    let point = |t: f64| -> Option<PairFidelities> {
        PairFidelities::new(
            start[0] + t * (1.0 - start[0]),
            start[1] + t * (1.0 - start[1]),
            start[2] + t * (1.0 - start[2]),
        )
        .ok()
    };
    let eval = |t: f64| -> Option<f64> { class2_relation(&point(t)?).ok() };
    let steps = 400;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let Some(v) = eval(t) else {
            prev = None;
            continue;
        };
        if let Some((t0, v0)) = prev {
            if v0 == 0.0 {
                return point(t0);
            }
            if v0 * v < 0.0 {
                let (mut lo, mut hi) = (t0, t);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let Some(vm) = eval(mid) else { break };
                    if vm * v0 <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return point(0.5 * (lo + hi));
            }
        }
        prev = Some((t, v));
    }
    None
}

fn criterion_11() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(11, "2→4 case-study closure");
    let sym = printed_symmetric_optimum().to_f64().unwrap();

    let at_sym = class2_relation(&PairFidelities::new(sym, sym, sym)?)?;
    if at_sym.abs() <= 1e-12 {
        rep.note(format!(
            "class-2 residual at (61/69, 61/69, 61/69): {at_sym:.2e} (zero as required)"
        ));
    } else {
        rep.fail(format!(
            "class-2 residual at (61/69, 61/69, 61/69): {at_sym:.2e} ≠ 0"
        ));
    }

    for (f, expect) in [(0.5f64, true), (0.95, false)] {
        let (member, class) = region_membership(&PairFidelities::new(f, f, f)?, 1e-6);
        if member == expect {
            rep.note(format!(
                "membership at ({f}, {f}, {f}): {member} (class {class}), as required"
            ));
        } else {
            rep.fail(format!(
                "membership at ({f}, {f}, {f}): {member}, expected {expect}"
            ));
        }
    }

    // Class-2 surface samples: the symmetric optimum plus two near-diagonal
    // ray roots (the class-2 domain is a thin sliver around the diagonal).
    let mut samples = vec![PairFidelities::new(sym, sym, sym)?];
    for start in [[0.70, 0.695, 0.705], [0.72, 0.717, 0.722]] {
        match class2_ray_root(start) {
            Some(p) => samples.push(p),
            None => rep.fail(format!("no class-2 surface root on the ray from {start:?}")),
        }
    }
    let phi = ghz_phi(2, 2)?;
    let labels = BitString::enumerate_weight(4, 2)?;
    let mut worst_quad = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for f in &samples {
        let abc = class2_witness(f)?;
        let beta = beta_from_reduced(&[abc[0], abc[1], abc[2], 0.0, 0.0, 0.0]);
        // Closure through the published-layer quadratic forms.
        let (got, asym) = crate::two_to_four::pair_fidelities_of_beta(&beta, true)?;
        let quad_dev = (got.f_1100 - f.f_1100)
            .abs()
            .max((got.f_1010 - f.f_1010).abs())
            .max((got.f_0110 - f.f_0110).abs())
            .max(asym);
        worst_quad = worst_quad.max(quad_dev);
        // Closure through the dense oracle.
        let map: BTreeMap<BitString, f64> =
            labels.iter().copied().zip(beta.iter().copied()).collect();
        let chi = build_chi(2, 4, 2, &map, &phi)?;
        let norm2 = chi.norm().powi(2);
        let targets = f.to_six();
        for y in &labels {
            let direct = fidelity_direct(&chi, 2, 4, 2, y)? / norm2;
            worst_oracle = worst_oracle.max((direct - targets[y]).abs());
        }
    }
    rep.note(format!(
        "published-layer closure over {} class-2 samples: reconstructed β \
         reproduces the pair fidelities through the published quadratic forms, \
         worst |Δ| = {worst_quad:.2e}",
        samples.len()
    ));
    if worst_oracle <= 1e-8 {
        rep.note(format!(
            "oracle closure: worst |Δ| = {worst_oracle:.2e} ≤ 1e-8"
        ));
    } else {
        rep.fail(format!(
            "oracle closure fails: the dense oracle assigns the reconstructed β \
             different pair fidelities, worst |Δ| = {worst_oracle:.2e} ≫ 1e-8 \
             (at the symmetric point the oracle gives 23/30, not 61/69; the \
             published relations live in a layer whose Gram entries differ \
             from the oracle's)"
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// 12. concavity and success probability
// ---------------------------------------------------------------------------

fn criterion_12() -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(12, "concavity and success probability");
    let mut rng = ChaCha8Rng::seed_from_u64(12001);
    let f_n = |x: &[f64]| -> f64 {
        let s: f64 = x.iter().map(|v| v.sqrt()).sum();
        s * s
    };
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for n in 2..=6usize {
        for _ in 0..40 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-9..1.0)).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-9..1.0)).collect();
            let theta: f64 = rng.gen_range(1e-9..1.0);
            let mix: Vec<f64> = x
                .iter()
                .zip(&z)
                .map(|(a, b)| theta * a + (1.0 - theta) * b)
                .collect();
            pairs += 1;
            if f_n(&mix) < theta * f_n(&x) + (1.0 - theta) * f_n(&z) - 1e-12 {
                violations += 1;
            }
        }
    }
    if violations == 0 {
        rep.note(format!(
            "concavity of (Σ√x_n)² holds on {pairs} random mixtures (N ∈ 2..=6) \
             with zero violations at tolerance 1e-12"
        ));
    } else {
        rep.fail(format!(
            "concavity violated on {violations} of {pairs} random mixtures"
        ));
    }

    let mut checked = 0usize;
    let mut worst_margin = f64::INFINITY;
    for n in 2..=5usize {
        let labels = BitString::enumerate_weight(n, 1)?;
        let g0 = build_g_y(1, n, 2, &BitString::zeros(n))?;
        for _ in 0..25 {
            let mut beta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let form = g0.quad_form_f64(&beta);
            for v in beta.iter_mut() {
                *v /= form.sqrt();
            }
            let map: BTreeMap<BitString, f64> =
                labels.iter().copied().zip(beta.iter().copied()).collect();
            let p = success_probability(&map, 1, n, 2)?;
            let bound = 1.0 / n as f64;
            checked += 1;
            worst_margin = worst_margin.min(p - bound);
            if p < bound - 1e-12 {
                rep.fail(format!(
                    "success probability {p:.12} below N^(-M) = {bound:.12} at N = {n}"
                ));
            }
        }
    }
    if rep.passed {
        rep.note(format!(
            "success probability ≥ N^(-M) on {checked} random normalised machines \
             (1→N, N ≤ 5, d = 2), smallest margin {worst_margin:.2e}"
        ));
    }
    Ok(rep)
}
