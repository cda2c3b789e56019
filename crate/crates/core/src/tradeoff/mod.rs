//! Solvers for achievable fidelity sets: exact symmetric formulas, the
//! `N−1→N` convex characterization, the `1→N` trade-off surface, the rank-1
//! reduction for subset fidelities, kernel consistency conditions, and the
//! general `(1,L,N)` feasibility pipeline.
//!
//! Site indices are 0-based from the left throughout; a "site-ordered"
//! vector lists site 0 first, while "canonical order" refers to the
//! ascending enumeration of [`BitString::enumerate_weight`].

pub mod convex;

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

use crate::bitstrings::{binom_rat, binom_usize, BitString};
use crate::error::{Error, Result};
use crate::gram::{build_g_ml, build_g_y};
use crate::matrix::Matrix;
use crate::{rat, Rat};
use convex::{ConvexFailure, ConvexSet, MinimizeOptions};

/// A target fidelity, exact or floating point. Closed-form comparisons stay
/// in rationals when every input is exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Exact(Rat),
    Approx(f64),
}

impl Target {
    pub fn to_f64(&self) -> f64 {
        match self {
            Target::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Target::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Target::Exact(r) => Some(r),
            Target::Approx(_) => None,
        }
    }
}

/// The machine shape: `M` inputs, `N` outputs, local dimension `d`, and the
/// label set Λ whose fidelities are constrained.
#[derive(Clone, Debug)]
pub struct CloneProblem {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub lambda: Vec<BitString>,
}

impl CloneProblem {
    pub fn new(m: usize, n: usize, d: usize, lambda: Vec<BitString>) -> Result<Self> {
        if m == 0 || m >= n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= M < N, got M={m}, N={n}"
            )));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "local dimension must satisfy d >= 2, got {d}"
            )));
        }
        for y in &lambda {
            if y.len() != n {
                return Err(Error::LengthMismatch(n, y.len()));
            }
        }
        Ok(Self { m, n, d, lambda })
    }

    /// Problem whose label set is every weight-`L` string.
    pub fn weight_homogeneous(m: usize, n: usize, d: usize, l: usize) -> Result<Self> {
        if l == 0 || l > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= L <= N, got L={l}, N={n}"
            )));
        }
        Self::new(m, n, d, BitString::enumerate_weight(n, l)?)
    }

    /// The common label weight, when the label set is weight-homogeneous.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut ws = self.lambda.iter().map(|y| y.weight());
        let first = ws.next()?;
        ws.all(|w| w == first).then_some(first)
    }
}

/// Requested fidelities per label.
#[derive(Clone, Debug, Default)]
pub struct FidelityVector {
    pub targets: BTreeMap<BitString, Target>,
}

impl FidelityVector {
    pub fn from_f64(map: BTreeMap<BitString, f64>) -> Result<Self> {
        let mut targets = BTreeMap::new();
        for (y, v) in map {
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "target for {y} out of [0,1]: {v}"
                )));
            }
            targets.insert(y, Target::Approx(v));
        }
        Ok(Self { targets })
    }

    pub fn from_exact(map: BTreeMap<BitString, Rat>) -> Result<Self> {
        let mut targets = BTreeMap::new();
        for (y, v) in map {
            if v.is_negative() || v > Rat::from_integer(1.into()) {
                return Err(Error::InvalidArgument(format!(
                    "target for {y} out of [0,1]: {v}"
                )));
            }
            targets.insert(y, Target::Exact(v));
        }
        Ok(Self { targets })
    }

    pub fn get_f64(&self, y: &BitString) -> Option<f64> {
        self.targets.get(y).map(Target::to_f64)
    }

    pub fn sum_f64(&self) -> f64 {
        self.targets.values().map(Target::to_f64).sum()
    }

    /// All targets as exact rationals, if every one is exact.
    pub fn all_exact(&self) -> Option<BTreeMap<BitString, Rat>> {
        self.targets
            .iter()
            .map(|(y, t)| t.as_exact().map(|r| (*y, r.clone())))
            .collect()
    }
}

/// Three-valued feasibility outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "Feasible",
            Verdict::Infeasible => "Infeasible",
            Verdict::Undetermined => "Undetermined",
        })
    }
}

/// Solver outcome: verdict plus witness/diagnostics.
#[derive(Clone, Debug)]
pub struct TradeoffResult {
    pub verdict: Verdict,
    /// Witness coefficients per label (`β^T G_0 β ≤ 1 + 1e−9` when present).
    pub witness_beta: Option<BTreeMap<BitString, f64>>,
    /// Fidelities the witness actually attains.
    pub achieved: Option<BTreeMap<BitString, f64>>,
    /// Named diagnostic values.
    pub residuals: BTreeMap<String, f64>,
}

impl TradeoffResult {
    fn bare(verdict: Verdict) -> Self {
        Self {
            verdict,
            witness_beta: None,
            achieved: None,
            residuals: BTreeMap::new(),
        }
    }

    fn with_residual(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.to_string(), value);
        self
    }
}

// ---------------------------------------------------------------------------
// symmetric fidelities
// ---------------------------------------------------------------------------

/// Exact fidelity of the fully symmetric `M→N` machine on any weight-`L`
/// subset, via two independent closed forms that must agree.
pub fn symmetric_fidelity(m: usize, l: usize, n: usize, d: usize) -> Result<Rat> {
    validate_mlnd(m, l, n, d)?;
    let s = crate::gram::row_sum_symmetric(m, l, n, d)?;
    let f1 = binom_rat((m + d - 1) as i64, m as i64) / binom_rat((n + d - 1) as i64, m as i64) * s
        / binom_rat(n as i64, l as i64);
    let f2 = symmetric_fidelity_alt(m, l, n, d);
    if f1 != f2 {
        return Err(Error::Domain(format!(
            "the two closed forms disagree at (M={m},L={l},N={n},d={d}): {f1} vs {f2}"
        )));
    }
    Ok(f1)
}

/// Second closed form, used as the internal cross-check.
fn symmetric_fidelity_alt(m: usize, l: usize, n: usize, d: usize) -> Rat {
    let (mi, li, ni, di) = (m as i64, l as i64, n as i64, d as i64);
    let mut s = Rat::zero();
    for i in 0..=mi {
        for q in 0..=ni {
            s += binom_rat(mi, i)
                * binom_rat(q - mi, i)
                * binom_rat(ni - mi + di - 1, ni - q)
                * binom_rat(mi + i, q - li);
        }
    }
    s / (binom_rat(ni, li) * binom_rat(ni + di - 1, ni - mi))
}

/// The alternative summation formula
/// `Σ_q C(q,M)C(q,L)C(N−q+d−2,d−2) / (C(N,L)C(N+d−1,N−M))`, evaluated
/// exactly for comparison against [`symmetric_fidelity`]. Equality is
/// tested, never assumed.
pub fn wang_formula(m: usize, l: usize, n: usize, d: usize) -> Result<Rat> {
    validate_mlnd(m, l, n, d)?;
    let (mi, li, ni, di) = (m as i64, l as i64, n as i64, d as i64);
    let mut s = Rat::zero();
    for q in 0..=ni {
        s += binom_rat(q, mi) * binom_rat(q, li) * binom_rat(ni - q + di - 2, di - 2);
    }
    Ok(s / (binom_rat(ni, li) * binom_rat(ni + di - 1, ni - mi)))
}

fn validate_mlnd(m: usize, l: usize, n: usize, d: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= M < N, got M={m}, N={n}"
        )));
    }
    if l == 0 || l > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= L <= N, got L={l}, N={n}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "local dimension must satisfy d >= 2, got {d}"
        )));
    }
    Ok(())
}

/// Quick necessary condition: the fidelities of any machine sum to at most
/// `C(N,L) · F_sym`. Returns `false` when the targets already violate that
/// bound (cloning certainly impossible), `true` when not excluded.
pub fn necessary_sum_test(problem: &CloneProblem, targets: &FidelityVector) -> Result<bool> {
    let l = problem.homogeneous_weight().ok_or_else(|| {
        Error::InvalidArgument("sum test requires a weight-homogeneous label set".into())
    })?;
    let (bound, _) = sum_test_bounds(problem.m, l, problem.n, problem.d)?;
    Ok(targets.sum_f64() <= bound + 1e-12)
}

/// The two candidate sum-bound constants: `C(N,L)·F_sym` (the one used) and
/// `C(N,M)·F_sym` (reported for comparison only).
pub fn sum_test_bounds(m: usize, l: usize, n: usize, d: usize) -> Result<(f64, f64)> {
    let fs = symmetric_fidelity(m, l, n, d)?.to_f64().expect("finite");
    Ok((binom_usize(n, l) as f64 * fs, binom_usize(n, m) as f64 * fs))
}

// ---------------------------------------------------------------------------
// N-1 -> N
// ---------------------------------------------------------------------------

/// `F_y = y·F − w_y + 1`: the fidelity any label `y` inherits from per-site
/// fidelities in the `N−1→N` regime.
pub fn general_fidelity(f_sites: &[f64], y: &BitString) -> Result<f64> {
    if y.len() != f_sites.len() {
        return Err(Error::LengthMismatch(f_sites.len(), y.len()));
    }
    let yf: f64 = y.sites().iter().map(|&s| f_sites[s]).sum();
    Ok(yf - y.weight() as f64 + 1.0)
}

fn h_objective(f: &[f64], d: usize) -> f64 {
    let t: f64 = f.iter().map(|&v| (1.0 - v).max(0.0).sqrt()).sum();
    f.iter().sum::<f64>() - t * t / (d - 1) as f64
}

/// Exact feasibility for `M = N−1`: minimizes
/// `Σ F_n − (Σ√(1−F_n))²/(d−1)` over per-site fidelities satisfying
/// `y·F ≥ F_y + w_y − 1` for every target label; cloning is possible iff
/// the minimum is ≤ N−1. The witness is `β_k = √(d(1−F_k)/(d−1))`, scaled
/// into normalization.
pub fn solve_nminus1(
    n: usize,
    d: usize,
    lambda: &[BitString],
    targets: &FidelityVector,
) -> Result<TradeoffResult> {
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("label set is empty".into()));
    }
    if d < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need N >= 2 and d >= 2, got N={n}, d={d}"
        )));
    }
    for y in lambda {
        if y.len() != n {
            return Err(Error::LengthMismatch(n, y.len()));
        }
        if !targets.targets.contains_key(y) {
            return Err(Error::InvalidArgument(format!("no target for label {y}")));
        }
    }
    let all_single = lambda.iter().all(|y| y.weight() == 1);

    // exact-rational fast path: symmetric single-site targets
    if all_single && lambda.len() == n {
        if let Some(exact) = targets.all_exact() {
            let vals: Vec<&Rat> = exact.values().collect();
            if vals.windows(2).all(|w| w[0] == w[1]) {
                let covers_all: std::collections::BTreeSet<usize> =
                    lambda.iter().flat_map(|y| y.sites()).collect();
                if covers_all.len() == n {
                    let r = vals[0].clone();
                    let ni = rat(n as i64, 1);
                    let h = ni.clone() * r.clone()
                        - ni.clone() * ni * (Rat::from_integer(1.into()) - r.clone())
                            / rat(d as i64 - 1, 1);
                    let bound = rat(n as i64 - 1, 1);
                    let feasible = h <= bound;
                    let mut out = finish_nminus1(
                        n,
                        d,
                        lambda,
                        targets,
                        &vec![r.to_f64().expect("finite"); n],
                    )?;
                    out.verdict = if feasible {
                        Verdict::Feasible
                    } else {
                        Verdict::Infeasible
                    };
                    if !feasible {
                        out.witness_beta = None;
                        out.achieved = None;
                    }
                    return Ok(out);
                }
            }
        }
    }

    // per-site lower bounds implied by the constraints
    let mut f_min = vec![0.0f64; n];
    let mut general = Vec::new();
    for y in lambda {
        let c = targets.get_f64(y).expect("checked above") + y.weight() as f64 - 1.0;
        if y.weight() == 1 {
            let s = y.sites()[0];
            f_min[s] = f_min[s].max(c.clamp(0.0, 1.0));
        } else {
            general.push((y, c));
        }
    }

    let f_star = if general.is_empty() {
        // objective is increasing in each coordinate: corner is optimal
        f_min.clone()
    } else {
        let mut sets = vec![ConvexSet::Box {
            lo: f_min.clone(),
            hi: vec![1.0; n],
        }];
        for (y, c) in &general {
            let mut normal = vec![0.0; n];
            for s in y.sites() {
                normal[s] = 1.0;
            }
            sets.push(ConvexSet::Halfspace { normal, offset: *c });
        }
        let df = (d - 1) as f64;
        let obj = |f: &[f64]| h_objective(f, d);
        let grad = move |f: &[f64]| {
            let t: f64 = f.iter().map(|&v| (1.0 - v).max(0.0).sqrt()).sum();
            f.iter()
                .map(|&v| 1.0 + t / (df * (1.0 - v).max(1e-18).sqrt()))
                .collect::<Vec<_>>()
        };
        match convex::convex_minimize(&obj, &grad, &sets, &f_min, &MinimizeOptions::default()) {
            Ok((_, arg)) => arg,
            Err(ConvexFailure::Infeasible { gap }) => {
                return Ok(
                    TradeoffResult::bare(Verdict::Infeasible).with_residual("constraint_gap", gap)
                )
            }
            Err(ConvexFailure::Undetermined) => {
                return Ok(TradeoffResult::bare(Verdict::Undetermined))
            }
        }
    };

    let h = h_objective(&f_star, d);
    let feasible = h <= (n - 1) as f64 + 1e-9;
    let mut out = finish_nminus1(n, d, lambda, targets, &f_star)?;
    out.verdict = if feasible {
        Verdict::Feasible
    } else {
        Verdict::Infeasible
    };
    if !feasible {
        out.witness_beta = None;
        out.achieved = None;
    }
    Ok(out)
}

/// Build the witness and diagnostics for a candidate per-site vector.
fn finish_nminus1(
    n: usize,
    d: usize,
    lambda: &[BitString],
    targets: &FidelityVector,
    f_star: &[f64],
) -> Result<TradeoffResult> {
    let df = (d - 1) as f64;
    let beta: Vec<f64> = f_star
        .iter()
        .map(|&v| (d as f64 * (1.0 - v).max(0.0) / df).sqrt())
        .collect();
    // beta^T G_0 beta for M = N-1: diagonal 1, off-diagonal 1/d; canonical
    // label order coincides with ascending missing-site order
    let s: f64 = beta.iter().sum();
    let sq: f64 = beta.iter().map(|b| b * b).sum();
    let form = sq + (s * s - sq) / d as f64;
    let t = if form > 1.0 { 1.0 / form.sqrt() } else { 1.0 };
    let scaled: Vec<f64> = beta.iter().map(|b| b * t).collect();
    let f_ach: Vec<f64> = scaled.iter().map(|b| 1.0 - df * b * b / d as f64).collect();
    let mut witness = BTreeMap::new();
    for (k, b) in scaled.iter().enumerate() {
        let label = BitString::from_sites(n, &[k])?.complement();
        witness.insert(label, *b);
    }
    let mut achieved = BTreeMap::new();
    let mut worst_slack = f64::INFINITY;
    for y in lambda {
        let fy = general_fidelity(&f_ach, y)?;
        worst_slack = worst_slack.min(fy - targets.get_f64(y).unwrap_or(0.0));
        achieved.insert(*y, fy);
    }
    let mut res = TradeoffResult::bare(Verdict::Feasible)
        .with_residual("objective", h_objective(f_star, d))
        .with_residual("bound", (n - 1) as f64)
        .with_residual("gram_form", scaled_form(&scaled, d))
        .with_residual("worst_target_slack", worst_slack);
    res.witness_beta = Some(witness);
    res.achieved = Some(achieved);
    Ok(res)
}

fn scaled_form(beta: &[f64], d: usize) -> f64 {
    let s: f64 = beta.iter().sum();
    let sq: f64 = beta.iter().map(|b| b * b).sum();
    sq + (s * s - sq) / d as f64
}

// ---------------------------------------------------------------------------
// 1 -> N
// ---------------------------------------------------------------------------

/// Per-site fidelities produced by a site-ordered `β` in the `1→N` machine:
/// `F_k = (d + ((d−1)β_k + Σβ)²) / (d(d+1))`.
pub fn single_site_fidelities(beta_sites: &[f64], d: usize) -> Vec<f64> {
    let s: f64 = beta_sites.iter().sum();
    let df = (d - 1) as f64;
    beta_sites
        .iter()
        .map(|&b| (d as f64 + (df * b + s).powi(2)) / (d * (d + 1)) as f64)
        .collect()
}

/// Residual of the `1→N` trade-off surface relation at a full fidelity
/// vector; 0 on the surface.
pub fn one_to_n_relation_residual(f: &[f64], n: usize, d: usize) -> f64 {
    let denom = (n + d - 1) as f64;
    let sum: f64 = f.iter().sum();
    let t: f64 = f
        .iter()
        .map(|&v| (v * (d + 1) as f64 - 1.0).max(0.0).sqrt())
        .sum();
    (d + 1) as f64 * sum / denom - 1.0 - (t / denom).powi(2)
}

/// Largest `F_N` compatible with `N−1` fixed single-site fidelities on the
/// `1→N` trade-off surface. Errors with "targets outside achievable region"
/// when the relation has no admissible root.
pub fn tradeoff_1_to_n(n: usize, d: usize, known: &[f64]) -> Result<f64> {
    if known.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "need exactly N-1 = {} known fidelities, got {}",
            n - 1,
            known.len()
        )));
    }
    let floor = 1.0 / (d + 1) as f64;
    for &f in known {
        if !(floor - 1e-9..=1.0 + 1e-9).contains(&f) {
            return Err(Error::InvalidArgument(format!(
                "known fidelity {f} outside [1/(d+1), 1] = [{floor}, 1]"
            )));
        }
    }
    let t: f64 = known
        .iter()
        .map(|&f| (f * (d + 1) as f64 - 1.0).max(0.0).sqrt())
        .sum();
    let s: f64 = known.iter().sum();
    let a = (n + d - 2) as f64;
    let bq = -2.0 * t;
    let c = (n + d - 1) as f64 * ((d + 1) as f64 * s + 1.0 - (n + d - 1) as f64) - t * t;
    let mut disc = bq * bq - 4.0 * a * c;
    let scale = (bq * bq).max((4.0 * a * c).abs()).max(1e-300);
    if disc.abs() < 1e-12 * scale {
        disc = 0.0; // double root: avoid sqrt-of-noise blowup
    }
    if disc < 0.0 {
        return Err(Error::OutsideAchievableRegion);
    }
    let roots = [
        (-bq + disc.sqrt()) / (2.0 * a),
        (-bq - disc.sqrt()) / (2.0 * a),
    ];
    let u = roots
        .iter()
        .copied()
        .filter(|&u| (-1e-12..=(d as f64).sqrt() + 1e-12).contains(&u))
        .fold(f64::NEG_INFINITY, f64::max);
    if u == f64::NEG_INFINITY {
        return Err(Error::OutsideAchievableRegion);
    }
    Ok((1.0 + u * u) / (d + 1) as f64)
}

/// Feasibility of `N` single-site targets for the `1→N` machine, via the
/// trade-off surface: targets below the floor `1/(d+1)` are free, and the
/// largest achievable last fidelity is compared against its target. The
/// witness β is reconstructed from the surface point.
pub fn feasibility_1_to_n(n: usize, d: usize, targets_sites: &[f64]) -> Result<TradeoffResult> {
    if targets_sites.len() != n {
        return Err(Error::LengthMismatch(n, targets_sites.len()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need N >= 2".into()));
    }
    let floor = 1.0 / (d + 1) as f64;
    if targets_sites.iter().any(|&f| f > 1.0 + 1e-9) {
        return Ok(TradeoffResult::bare(Verdict::Infeasible).with_residual(
            "max_target_excess",
            targets_sites.iter().fold(0.0f64, |a, &b| a.max(b)) - 1.0,
        ));
    }
    let clamped: Vec<f64> = targets_sites
        .iter()
        .map(|&f| f.max(floor).min(1.0))
        .collect();
    let known = &clamped[..n - 1];
    let best_last = match tradeoff_1_to_n(n, d, known) {
        Ok(v) => v,
        Err(Error::OutsideAchievableRegion) => {
            return Ok(
                TradeoffResult::bare(Verdict::Infeasible).with_residual("surface_root", f64::NAN)
            )
        }
        Err(e) => return Err(e),
    };
    let target_last = clamped[n - 1];
    let mut surface = clamped.clone();
    surface[n - 1] = best_last;
    // recover beta from the surface point: s_k = sqrt(d((d+1)F_k - 1)),
    // beta_k = (s_k - S)/(d-1) with S = sum(s)/(N+d-1)
    let svec: Vec<f64> = surface
        .iter()
        .map(|&f| (d as f64 * ((d + 1) as f64 * f - 1.0).max(0.0)).sqrt())
        .collect();
    let ssum: f64 = svec.iter().sum();
    let cap_s = ssum / (n + d - 1) as f64;
    let beta: Vec<f64> = svec
        .iter()
        .map(|&sk| (sk - cap_s) / (d - 1) as f64)
        .collect();
    let achieved_f = single_site_fidelities(&beta, d);
    let mut witness = BTreeMap::new();
    let mut achieved = BTreeMap::new();
    for k in 0..n {
        let label = BitString::from_sites(n, &[k])?;
        witness.insert(label, beta[k]);
        achieved.insert(label, achieved_f[k]);
    }
    let form = {
        let s: f64 = beta.iter().sum();
        let sq: f64 = beta.iter().map(|b| b * b).sum();
        ((d - 1) as f64 * sq + s * s) / d as f64
    };
    let feasible = best_last >= target_last - 1e-9;
    let mut out = TradeoffResult::bare(if feasible {
        Verdict::Feasible
    } else {
        Verdict::Infeasible
    })
    .with_residual("best_last_fidelity", best_last)
    .with_residual("target_last_fidelity", target_last)
    .with_residual("gram_form", form)
    .with_residual(
        "surface_relation",
        one_to_n_relation_residual(&achieved_f, n, d),
    );
    if feasible {
        out.witness_beta = Some(witness);
        out.achieved = Some(achieved);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// rank-1 reduction (M = 1)
// ---------------------------------------------------------------------------

/// The linear combination `g0·G_0 + g1·G_{site-1}^{(L)} + g2·G_0^{(L)}`
/// collapsed to a rank-1 projector `Γ Γᵀ`, with the structural coefficients
/// `a_0..a_5` of the aggregated matrices kept exact.
#[derive(Clone, Debug)]
pub struct Rank1Reduction {
    pub n: usize,
    pub d: usize,
    pub l: usize,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Structure constants of `G_{site-1}^{(L)}` and `G_0^{(L)}` in the
    /// `{identity, |1⟩⟨1|, |1⟩⟨j|+|j⟩⟨1|, |j⟩⟨j|}` decomposition.
    pub a: [Rat; 6],
    /// Site-ordered unit vector: `γ1` at site 0, `γ2` elsewhere.
    pub gamma: Vec<f64>,
}

/// Exact structure constants `a_0..a_5` of the aggregated Gram matrices for
/// `M = 1`.
pub fn a_coefficients(n: usize, l: usize, d: usize) -> Result<[Rat; 6]> {
    if n < 2 || l == 0 || l > n || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "need N >= 2, 1 <= L <= N, d >= 2; got N={n}, L={l}, d={d}"
        )));
    }
    let (ni, li, di) = (n as i64, l as i64, d as i64);
    let b = binom_rat;
    let a2 = b(ni - 1, li - 1) / rat(ni - 1, 1)
        * (rat(li - 1, 1) / b(di + li - 2, di - 1) + rat(ni - li, 1) / b(di + li - 1, di - 1));
    let a3 = if n == 2 {
        Rat::zero()
    } else {
        b(ni - 1, li - 1) / b(ni - 1, 2)
            * (b(li - 1, 2) / b(di + li - 2, di - 1)
                + rat((li - 1) * (ni - li), 1) / b(di + li - 1, di - 1)
                + b(ni - li, 2) / b(di + li, di - 1))
    };
    let a0 = a2.clone() - a3.clone();
    let a1 = b(ni - 1, li - 1) / b(di + li - 2, di - 1) - a0.clone();
    let a4 = b(ni, li) / b(ni, 2)
        * (b(li, 2) / b(di + li - 2, di - 1)
            + rat(li * (ni - li), 1) / b(di + li - 1, di - 1)
            + b(ni - li, 2) / b(di + li, di - 1));
    let a5 = b(ni, li) / rat(ni, 1)
        * (rat(li, 1) / b(di + li - 2, di - 1) + rat(ni - li, 1) / b(di + li - 1, di - 1))
        - a4.clone();
    Ok([a0, a1, a2, a3, a4, a5])
}

fn eig2_top_abs(a: f64, b: f64, c: f64) -> (f64, [f64; 2]) {
    // symmetric [[a,b],[b,c]]; returns the eigenpair of largest |eigenvalue|
    let mid = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (lo, hi) = (mid - r, mid + r);
    let lam = if lo.abs() > hi.abs() { lo } else { hi };
    let v = if b.abs() > 1e-14 {
        [b, lam - a]
    } else if (lam - a).abs() < (lam - c).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let nrm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    (lam, [v[0] / nrm, v[1] / nrm])
}

/// Solve for the rank-1 combination of `G_0`, `G_{site-1}^{(L)}`,
/// `G_0^{(L)}` (all with `M = 1`). Exists for every `1 ≤ L ≤ N−1`; the
/// global-fidelity case `L = N` is excluded (solved separately in closed
/// form).
pub fn rank1_reduction(n: usize, d: usize, l: usize) -> Result<Rank1Reduction> {
    if l == n {
        return Err(Error::NoRank1Reduction);
    }
    if n < 2 || l == 0 || l > n || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "need N >= 2, 1 <= L <= N-1, d >= 2; got N={n}, L={l}, d={d}"
        )));
    }
    let a = a_coefficients(n, l, d)?;
    let (red, checked) = if n == 2 {
        let df = d as f64;
        let g = [df / (df - 1.0), -df / (df - 1.0), 0.0];
        (
            Rank1Reduction {
                n,
                d,
                l,
                g0: g[0],
                g1: g[1],
                g2: g[2],
                gamma1: 0.0,
                gamma2: 1.0,
                a,
                gamma: vec![0.0, 1.0],
            },
            false,
        )
    } else {
        let af: Vec<f64> = a.iter().map(|r| r.to_f64().expect("finite")).collect();
        let (a0, a1, a2, a3, a4, a5) = (af[0], af[1], af[2], af[3], af[4], af[5]);
        let df = d as f64;
        let s = ((n - 1) as f64).sqrt();
        let b0 = [1.0, s / df, s / df, (n - 1) as f64 / df + (df - 1.0) / df];
        let b1 = [a1 + a0, a2 * s, a2 * s, a3 * (n - 1) as f64 + a0];
        let b2 = [a4 + a5, a4 * s, a4 * s, a4 * (n - 1) as f64 + a5];
        let wid = [(df - 1.0) / df, a0, a5];
        let tr = [b0[0] + b0[3], b1[0] + b1[3], b2[0] + b2[3]];
        // line {g : wid·g = 0, tr·g = 1} = p + t·nvec
        let dot3 = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let (aa, ab, bb) = (dot3(&wid, &wid), dot3(&wid, &tr), dot3(&tr, &tr));
        let det = aa * bb - ab * ab;
        if det.abs() < 1e-18 {
            return Err(Error::DegenerateReduction);
        }
        let (l1, l2) = (-ab / det, aa / det);
        let p = [
            l1 * wid[0] + l2 * tr[0],
            l1 * wid[1] + l2 * tr[1],
            l1 * wid[2] + l2 * tr[2],
        ];
        let nvec = [
            wid[1] * tr[2] - wid[2] * tr[1],
            wid[2] * tr[0] - wid[0] * tr[2],
            wid[0] * tr[1] - wid[1] * tr[0],
        ];
        let block = |g: &[f64; 3]| {
            [
                g[0] * b0[0] + g[1] * b1[0] + g[2] * b2[0],
                g[0] * b0[1] + g[1] * b1[1] + g[2] * b2[1],
                g[0] * b0[2] + g[1] * b1[2] + g[2] * b2[2],
                g[0] * b0[3] + g[1] * b1[3] + g[2] * b2[3],
            ]
        };
        // det(X + tY) = det X + t(X00 Y11 + Y00 X11 - X01 Y10 - Y01 X10) + t^2 det Y
        let x = block(&p);
        let y = block(&nvec);
        let c0 = x[0] * x[3] - x[1] * x[2];
        let c1 = x[0] * y[3] + y[0] * x[3] - x[1] * y[2] - y[1] * x[2];
        let c2 = y[0] * y[3] - y[1] * y[2];
        let roots: Vec<f64> = if c2.abs() < 1e-14 {
            if c1.abs() < 1e-14 {
                return Err(Error::DegenerateReduction);
            }
            vec![-c0 / c1]
        } else {
            let disc = (c1 * c1 - 4.0 * c2 * c0).max(0.0);
            vec![
                (-c1 + disc.sqrt()) / (2.0 * c2),
                (-c1 - disc.sqrt()) / (2.0 * c2),
            ]
        };
        let mut sols = Vec::new();
        for t in roots {
            let g = [p[0] + t * nvec[0], p[1] + t * nvec[1], p[2] + t * nvec[2]];
            let bg = block(&g);
            let (lam, v) = eig2_top_abs(bg[0], bg[1], bg[3]);
            if lam < 0.0 {
                continue;
            }
            let scale = lam.sqrt();
            let mut g1v = v[0] * scale;
            let mut g2v = v[1] * scale / s;
            if g1v + (n - 1) as f64 * g2v < 0.0 {
                g1v = -g1v;
                g2v = -g2v;
            }
            if (g1v - g2v).abs() > 1e-8 {
                sols.push((g, g1v, g2v));
            }
        }
        if sols.len() != 1 {
            return Err(Error::DegenerateReduction);
        }
        let (g, g1v, g2v) = sols.remove(0);
        let mut gamma = vec![g2v; n];
        gamma[0] = g1v;
        (
            Rank1Reduction {
                n,
                d,
                l,
                g0: g[0],
                g1: g[1],
                g2: g[2],
                gamma1: g1v,
                gamma2: g2v,
                a,
                gamma,
            },
            true,
        )
    };
    if checked && (red.gamma1.powi(2) + (n - 1) as f64 * red.gamma2.powi(2) - 1.0).abs() > 1e-10 {
        return Err(Error::Domain("reduction lost γ normalization".into()));
    }
    verify_rank1(&red)?;
    Ok(red)
}

/// Numerical confirmation that the returned combination is rank 1 and equals
/// the outer product of the canonical Γ.
fn verify_rank1(red: &Rank1Reduction) -> Result<()> {
    let (n, d, l) = (red.n, red.d, red.l);
    let zero = BitString::zeros(n);
    let site1 = BitString::from_sites(n, &[0])?;
    let g0 = build_g_y(1, n, d, &zero)?.to_f64();
    let g1 = build_g_ml(1, n, d, l, &site1)?.to_f64();
    let g0l = build_g_ml(1, n, d, l, &zero)?.to_f64();
    let p = g0
        .scale(&red.g0)
        .add(&g1.scale(&red.g1))
        .add(&g0l.scale(&red.g2));
    let sv = p.singular_values();
    if sv.len() > 1 && sv[1] > 1e-9 * sv[0].max(1e-30) {
        return Err(Error::Domain(format!(
            "combination is not rank 1: singular values {:.3e}, {:.3e}",
            sv[0], sv[1]
        )));
    }
    // canonical (string) order puts site 0 last
    let mut gamma_str = vec![red.gamma2; n];
    gamma_str[n - 1] = red.gamma1;
    let outer = Matrix::from_fn(n, n, |i, j| gamma_str[i] * gamma_str[j]);
    if p.max_abs_diff(&outer) > 1e-8 {
        return Err(Error::Domain(
            "combination does not match the canonical Γ outer product".into(),
        ));
    }
    Ok(())
}

/// Invert the per-site radical relations of the rank-1 reduction: given all
/// weight-`L` subset fidelities, recover the site-ordered β.
///
/// Radicands `g0 + g1·F_n + g2·q` below `−1e−12` signal an infeasible
/// target set; values in `[−1e−12, 0)` are clipped to 0.
pub fn beta_from_fidelities(
    red: &Rank1Reduction,
    targets: &BTreeMap<BitString, f64>,
) -> Result<Vec<f64>> {
    let (n, l) = (red.n, red.l);
    let labels = BitString::enumerate_weight(n, l)?;
    for y in &labels {
        if !targets.contains_key(y) {
            return Err(Error::InvalidArgument(format!(
                "missing target for weight-{l} label {y}"
            )));
        }
    }
    let q: f64 = labels.iter().map(|y| targets[y]).sum();
    let mut r = Vec::with_capacity(n);
    for site in 0..n {
        let f_n: f64 = labels
            .iter()
            .filter(|y| y.bit(site))
            .map(|y| targets[y])
            .sum();
        r.push(red.g0 + red.g1 * f_n + red.g2 * q);
    }
    if r.iter().any(|&v| v < -1e-12) {
        return Err(Error::OutsideAchievableRegion);
    }
    let denom = (n - 1) as f64 * red.gamma2 + red.gamma1;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateReduction);
    }
    let sum_beta: f64 = r.iter().map(|&v| v.max(0.0).sqrt()).sum::<f64>() / denom;
    Ok(r.iter()
        .map(|&v| (v.max(0.0).sqrt() - red.gamma2 * sum_beta) / (red.gamma1 - red.gamma2))
        .collect())
}

// ---------------------------------------------------------------------------
// kernel consistency conditions
// ---------------------------------------------------------------------------

/// The 0/1 incidence matrix between weight-`2M` rows and weight-`L` columns
/// (`X[x][y] = 1` iff `x·y = 2M`), with its exact rational kernel.
#[derive(Clone, Debug)]
pub struct ConsistencyMatrix {
    pub m: usize,
    pub l: usize,
    pub n: usize,
    pub rows: Vec<BitString>,
    pub cols: Vec<BitString>,
    pub x: Matrix<Rat>,
    pub kernel: Vec<Vec<Rat>>,
    pub rank: usize,
    /// Whether `(M, L, N)` lies in the window where the kernel conditions
    /// apply (`1 < L < N−1` for `M = 1`, else `2M < L < N−2M`). Outside the
    /// window no conditions are emitted.
    pub in_window: bool,
}

pub fn kernel_x(m: usize, l: usize, n: usize) -> Result<ConsistencyMatrix> {
    if m == 0 || l > n || 2 * m > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= M, 2M <= N, L <= N; got M={m}, L={l}, N={n}"
        )));
    }
    let in_window = if m == 1 {
        1 < l && l < n - 1
    } else {
        2 * m < l && n > 2 * m && l < n - 2 * m
    };
    let rows = BitString::enumerate_weight(n, 2 * m)?;
    let cols = BitString::enumerate_weight(n, l)?;
    if !in_window {
        return Ok(ConsistencyMatrix {
            m,
            l,
            n,
            x: Matrix::zeros(rows.len(), cols.len()),
            rows,
            cols,
            kernel: Vec::new(),
            rank: 0,
            in_window,
        });
    }
    let x = Matrix::from_fn(rows.len(), cols.len(), |i, j| {
        if rows[i].dot(&cols[j]).expect("equal lengths") == 2 * m {
            Rat::from_integer(1.into())
        } else {
            Rat::zero()
        }
    });
    let (_, _, rank) = x.rref();
    let kernel = x.kernel_basis();
    Ok(ConsistencyMatrix {
        m,
        l,
        n,
        rows,
        cols,
        x,
        kernel,
        rank,
        in_window,
    })
}

// ---------------------------------------------------------------------------
// residual quadratics
// ---------------------------------------------------------------------------

/// Residual of the cross-site quadratic identity: for sites `(a, b, c, e)`,
/// `βᵀ(G_{ab}+G_{ce}−G_{ac}−G_{be})β − 2(d−1)(β_a−β_e)(β_b−β_c)/((d+L)C(d+L−1,d))`.
/// Zero (to rounding) for every β; large residuals flag inconsistent
/// fidelity assignments reconstructed elsewhere.
pub fn residual_quadratics(
    beta_sites: &[f64],
    d: usize,
    l: usize,
    sites: (usize, usize, usize, usize),
) -> Result<f64> {
    let n = beta_sites.len();
    if n < 4 {
        return Err(Error::InvalidArgument(
            "residual quadratics need N >= 4".into(),
        ));
    }
    let (a, b, c, e) = sites;
    let mut distinct = [a, b, c, e];
    distinct.sort_unstable();
    if distinct.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("sites must be distinct".into()));
    }
    if distinct[3] >= n {
        return Err(Error::InvalidArgument("site index out of range".into()));
    }
    let pair = |u: usize, v: usize| -> Result<Matrix<f64>> {
        let y = BitString::from_sites(n, &[u, v])?;
        Ok(build_g_ml(1, n, d, l, &y)?.to_f64())
    };
    let k = pair(a, b)?
        .add(&pair(c, e)?)
        .sub(&pair(a, c)?)
        .sub(&pair(b, e)?);
    // canonical weight-1 order lists site N-1 first
    let beta_str: Vec<f64> = (0..n).map(|i| beta_sites[n - 1 - i]).collect();
    let lhs = k.quad_form(&beta_str);
    let rhs =
        2.0 * (d - 1) as f64 * (beta_sites[a] - beta_sites[e]) * (beta_sites[b] - beta_sites[c])
            / ((d + l) as f64 * binom_usize(d + l - 1, d) as f64);
    Ok(lhs - rhs)
}

// ---------------------------------------------------------------------------
// classification & success probability
// ---------------------------------------------------------------------------

/// Whether a rank-1 reduction of the subset-fidelity program is known to
/// exist for the given shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank1Class {
    Exists,
    Excluded,
    Unknown,
}

impl std::fmt::Display for Rank1Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rank1Class::Exists => "Exists",
            Rank1Class::Excluded => "Excluded",
            Rank1Class::Unknown => "Unknown",
        })
    }
}

pub fn rank1_classification(m: usize, _l: usize, n: usize) -> Rank1Class {
    if m == 1 || n == m + 1 {
        Rank1Class::Exists
    } else if n <= 2 * m || m.is_multiple_of(2) {
        Rank1Class::Excluded
    } else {
        Rank1Class::Unknown
    }
}

/// Probability that the measure-and-prepare realization succeeds:
/// `1/(N^M Σ β_x²)`. For non-negative normalized β this is at least
/// `N^{−M}`.
pub fn success_probability(
    beta: &BTreeMap<BitString, f64>,
    m: usize,
    n: usize,
    d: usize,
) -> Result<f64> {
    let labels = BitString::enumerate_weight(n, m)?;
    let mut vec = Vec::with_capacity(labels.len());
    for x in &labels {
        vec.push(*beta.get(x).ok_or_else(|| {
            Error::InvalidArgument(format!("missing β for weight-{m} label {x}"))
        })?);
    }
    let g0 = build_g_y(m, n, d, &BitString::zeros(n))?;
    let form = g0.quad_form_f64(&vec);
    if (form - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "β is not normalized: βᵀG₀β = {form}"
        )));
    }
    let sq: f64 = vec.iter().map(|b| b * b).sum();
    Ok(1.0 / ((n as f64).powi(m as i32) * sq))
}

// ---------------------------------------------------------------------------
// (1, L, N) feasibility pipeline
// ---------------------------------------------------------------------------

/// Feasibility of a full set of weight-`L` subset-fidelity targets for the
/// `1→N` machine, `1 < L < N−1`.
///
/// Pipeline: (1) exact sum bound and kernel-constrained convex relaxation —
/// both give sound Infeasible certificates; (2) multi-start β search with
/// the rank-1 normalization enforced directly as `βᵀG₀β = 1` — success
/// gives a Feasible verdict with an oracle-checkable witness; (3) otherwise
/// Undetermined, with the cross-site quadratic residuals of the best β as
/// diagnostics.
pub fn feasibility_1ln(
    n: usize,
    d: usize,
    l: usize,
    targets: &BTreeMap<BitString, f64>,
) -> Result<TradeoffResult> {
    if !(1 < l && l < n.saturating_sub(1)) {
        return Err(Error::InvalidArgument(format!(
            "L={l} is outside (1, N-1); use the closed-form 1→N solver for L=1, \
             the L=N-1 reduction, or the global-fidelity formula for L=N"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    let labels = BitString::enumerate_weight(n, l)?;
    let mut t = Vec::with_capacity(labels.len());
    for y in &labels {
        let v = *targets.get(y).ok_or_else(|| {
            Error::InvalidArgument(format!("missing target for weight-{l} label {y}"))
        })?;
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "target for {y} out of [0,1]: {v}"
            )));
        }
        t.push(v.clamp(0.0, 1.0));
    }

    // stage 1a: exact sum bound
    let (bound_l, bound_m) = sum_test_bounds(1, l, n, d)?;
    let sum_t: f64 = t.iter().sum();
    let mut residuals = BTreeMap::new();
    residuals.insert("sum_targets".into(), sum_t);
    residuals.insert("sum_bound".into(), bound_l);
    residuals.insert("sum_bound_alt_constant".into(), bound_m);
    if sum_t > bound_l + 1e-12 {
        let mut out = TradeoffResult::bare(Verdict::Infeasible);
        out.residuals = residuals;
        return Ok(out);
    }

    // stage 1b: convex relaxation over candidate full fidelity vectors
    let kx = kernel_x(1, l, n)?;
    let mut sets = vec![ConvexSet::Box {
        lo: t.clone(),
        hi: vec![1.0; labels.len()],
    }];
    for v in &kx.kernel {
        sets.push(ConvexSet::Hyperplane {
            normal: v.iter().map(|r| r.to_f64().expect("finite")).collect(),
            offset: 0.0,
        });
    }
    let lin = |x: &[f64]| x.iter().sum::<f64>();
    let lin_grad = |x: &[f64]| vec![1.0; x.len()];
    match convex::convex_minimize(&lin, &lin_grad, &sets, &t, &MinimizeOptions::default()) {
        Ok((min_sum, _)) => {
            residuals.insert("relaxation_min_sum".into(), min_sum);
            if min_sum > bound_l + 1e-9 {
                let mut out = TradeoffResult::bare(Verdict::Infeasible);
                out.residuals = residuals;
                return Ok(out);
            }
        }
        Err(ConvexFailure::Infeasible { gap }) => {
            residuals.insert("relaxation_gap".into(), gap);
            let mut out = TradeoffResult::bare(Verdict::Infeasible);
            out.residuals = residuals;
            return Ok(out);
        }
        Err(ConvexFailure::Undetermined) => {
            residuals.insert("relaxation_min_sum".into(), f64::NAN);
        }
    }

    // stage 2: direct multi-start search over normalized β
    let g_site: Vec<Matrix<f64>> = labels
        .iter()
        .map(|y| Ok(to_site_order(&build_g_y(1, n, d, y)?.to_f64(), n)))
        .collect::<Result<_>>()?;
    let g0_site = to_site_order(&build_g_y(1, n, d, &BitString::zeros(n))?.to_f64(), n);
    let (best_pen, best_beta) = beta_penalty_search(&g_site, &g0_site, &t, n);
    let fids: Vec<f64> = g_site.iter().map(|g| g.quad_form(&best_beta)).collect();
    let worst_gap = fids
        .iter()
        .zip(&t)
        .map(|(f, tv)| tv - f)
        .fold(f64::NEG_INFINITY, f64::max);
    residuals.insert("search_penalty".into(), best_pen);
    residuals.insert("worst_target_gap".into(), worst_gap);
    if worst_gap <= 1e-9 {
        let mut witness = BTreeMap::new();
        for (site, b) in best_beta.iter().enumerate() {
            witness.insert(BitString::from_sites(n, &[site])?, *b);
        }
        let mut achieved = BTreeMap::new();
        for (y, f) in labels.iter().zip(&fids) {
            achieved.insert(*y, *f);
        }
        if let Ok(dev) = oracle_confirm(n, d, &best_beta, &labels, &fids) {
            residuals.insert("oracle_max_dev".into(), dev);
        }
        let mut out = TradeoffResult::bare(Verdict::Feasible);
        out.witness_beta = Some(witness);
        out.achieved = Some(achieved);
        out.residuals = residuals;
        return Ok(out);
    }

    // stage 3: undetermined; report cross-site quadratic residuals at the
    // best β for the first few site quadruples
    let mut quad = 0.0f64;
    if n >= 4 {
        for perm in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
            if let Ok(r) = residual_quadratics(&best_beta, d, l, perm) {
                quad = quad.max(r.abs());
            }
        }
    }
    residuals.insert("cross_quadratic_residual".into(), quad);
    let mut out = TradeoffResult::bare(Verdict::Undetermined);
    out.residuals = residuals;
    Ok(out)
}

/// Reindex a canonical weight-1-ordered matrix into site order (site 0
/// first). Canonical order lists the site-(N−1) string first.
fn to_site_order(g: &Matrix<f64>, n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |i, j| g[(n - 1 - i, n - 1 - j)])
}

pub(crate) fn beta_penalty_search(
    g_site: &[Matrix<f64>],
    g0_site: &Matrix<f64>,
    t: &[f64],
    n: usize,
) -> (f64, Vec<f64>) {
    let penalty = |beta: &[f64]| -> f64 {
        let form = g0_site.quad_form(beta);
        if form < 1e-12 {
            return f64::INFINITY;
        }
        g_site
            .iter()
            .zip(t)
            .map(|(g, &tv)| {
                let f = g.quad_form(beta) / form;
                (tv - f).max(0.0).powi(2)
            })
            .sum()
    };
    let grad = |beta: &[f64]| -> Vec<f64> {
        let form = g0_site.quad_form(beta);
        let g0b = g0_site.mul_vec(beta);
        let mut out = vec![0.0; n];
        for (g, &tv) in g_site.iter().zip(t) {
            let raw = g.quad_form(beta);
            let f = raw / form;
            let gap = (tv - f).max(0.0);
            if gap > 0.0 {
                let gb = g.mul_vec(beta);
                for i in 0..n {
                    let df = 2.0 * (gb[i] * form - raw * g0b[i]) / (form * form);
                    out[i] += -2.0 * gap * df;
                }
            }
        }
        out
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for _ in 0..23 {
        starts.push((0..n).map(|_| rng.gen_range(0.05..1.0)).collect());
    }
    for _ in 0..8 {
        starts.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    let mut best = (f64::INFINITY, vec![0.0; n]);
    for mut beta in starts {
        // normalize once, then descend
        let f0 = g0_site.quad_form(&beta).abs().sqrt();
        if f0 > 1e-12 {
            for b in beta.iter_mut() {
                *b /= f0;
            }
        }
        let mut pen = penalty(&beta);
        let mut step = 0.1f64;
        for _ in 0..2000 {
            if pen < 1e-20 {
                break;
            }
            let g = grad(&beta);
            let gnorm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                break;
            }
            let mut t_step = step;
            let mut moved = false;
            for _ in 0..30 {
                let trial: Vec<f64> = beta.iter().zip(&g).map(|(b, gi)| b - t_step * gi).collect();
                let p_new = penalty(&trial);
                if p_new < pen {
                    beta = trial;
                    pen = p_new;
                    step = (t_step * 1.5).min(1.0);
                    moved = true;
                    break;
                }
                t_step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let form = g0_site.quad_form(&beta);
        if form > 1e-12 {
            let scale = form.sqrt();
            for b in beta.iter_mut() {
                *b /= scale;
            }
        }
        let pen_final = penalty(&beta);
        if pen_final < best.0 {
            best = (pen_final, beta);
        }
        if best.0 < 1e-20 {
            break;
        }
    }
    best
}

/// Confirm witness fidelities against the dense oracle when the dimension
/// budget allows; returns the maximum deviation.
fn oracle_confirm(
    n: usize,
    d: usize,
    beta_sites: &[f64],
    labels: &[BitString],
    fids: &[f64],
) -> Result<f64> {
    crate::hilbert::checked_dim(1 + n, d)?;
    let phi = crate::hilbert::ghz_phi(n - 1, d)?;
    let mut map = BTreeMap::new();
    for (site, &b) in beta_sites.iter().enumerate() {
        map.insert(BitString::from_sites(n, &[site])?, b);
    }
    let chi = crate::hilbert::build_chi(1, n, d, &map, &phi)?;
    let mut dev = 0.0f64;
    for (y, &f) in labels.iter().zip(fids) {
        let direct = crate::hilbert::fidelity_direct(&chi, 1, n, d, y)?;
        dev = dev.max((direct - f).abs());
    }
    Ok(dev)
}
