//! Exact-rational construction and spectral analysis of the Gram matrices
//! `G_y` and their weight-aggregated sums `G_y^{(L)}`.
//!
//! `G_0` encodes the normalization of the Bell-type basis states and the
//! other labels encode fidelities as quadratic forms. Every entry is an
//! exact rational; floats appear only at the dense-eigensolver boundary.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitstrings::{binom_rat, BitString};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::{Rat, RatMatrix};

/// Which matrix a [`GramMatrix`] holds: a single label `y`, or the sum over
/// all weight-`L` labels compatible with `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GramLabel {
    Single(BitString),
    Aggregated { y: BitString, l: usize },
}

/// A square matrix of exact rationals indexed by the canonical enumeration
/// of weight-`M` strings on `N` sites.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub label: GramLabel,
    /// Row/column labels in canonical (ascending) order.
    pub index: Vec<BitString>,
    pub entries: RatMatrix,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.index.len()
    }

    /// Canonical position of a weight-`M` string among the rows.
    pub fn position(&self, x: &BitString) -> Option<usize> {
        self.index.iter().position(|b| b == x)
    }

    pub fn entry(&self, x: &BitString, z: &BitString) -> Option<&Rat> {
        let i = self.position(x)?;
        let j = self.position(z)?;
        Some(&self.entries[(i, j)])
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.entries.map(|r| r.to_f64().expect("finite rational"))
    }

    /// Exact quadratic form `βᵀ G β` with `β` in canonical row order.
    pub fn quad_form(&self, beta: &[Rat]) -> Rat {
        self.entries.quad_form(beta)
    }

    pub fn quad_form_f64(&self, beta: &[f64]) -> f64 {
        self.to_f64().quad_form(beta)
    }

    /// JSON dump `{M, N, d, y, [L,] rows}` with rationals as `"p/q"` strings
    /// and rows in canonical order.
    pub fn dump_json(&self) -> String {
        let rows: Vec<Vec<String>> = (0..self.size())
            .map(|i| {
                (0..self.size())
                    .map(|j| self.entries[(i, j)].to_string())
                    .collect()
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("M".into(), self.m.into());
        obj.insert("N".into(), self.n.into());
        obj.insert("d".into(), self.d.into());
        match &self.label {
            GramLabel::Single(y) => {
                obj.insert("y".into(), y.to_string().into());
            }
            GramLabel::Aggregated { y, l } => {
                obj.insert("y".into(), y.to_string().into());
                obj.insert("L".into(), (*l).into());
            }
        }
        obj.insert("rows".into(), serde_json::json!(rows));
        serde_json::Value::Object(obj).to_string()
    }
}

/// Eigenvalues with multiplicities, either exact (closed form) or floating
/// point (numeric decomposition).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport<T> {
    /// Distinct eigenvalues; for closed-form reports, index `k` is the
    /// angular-momentum class `k`.
    pub eigenvalues: Vec<T>,
    pub degeneracies: Vec<usize>,
}

impl<T: Clone> SpectrumReport<T> {
    pub fn total_degeneracy(&self) -> usize {
        self.degeneracies.iter().sum()
    }

    /// Every eigenvalue repeated by its multiplicity.
    pub fn expand(&self) -> Vec<T> {
        self.eigenvalues
            .iter()
            .zip(&self.degeneracies)
            .flat_map(|(v, &g)| std::iter::repeat_n(v.clone(), g))
            .collect()
    }
}

impl SpectrumReport<Rat> {
    /// `Σ eigenvalue · degeneracy`, which must equal the matrix trace.
    pub fn weighted_sum(&self) -> Rat {
        self.eigenvalues
            .iter()
            .zip(&self.degeneracies)
            .map(|(v, &g)| v * Rat::from_integer(g.into()))
            .fold(Rat::zero(), |a, b| a + b)
    }
}

fn validate_dims(m: usize, n: usize, d: usize) -> Result<()> {
    if n == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= M <= N with N >= 1, got M={m}, N={n}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "local dimension must satisfy d >= 2, got {d}"
        )));
    }
    Ok(())
}

/// The matrix with entry `(x, z) = 1 / C(M+d−1−x·z+w, d−1)` where
/// `w = weight(x̄ ∩ z̄ ∩ y)`, over canonical weight-`M` rows.
pub fn build_g_y(m: usize, n: usize, d: usize, y: &BitString) -> Result<GramMatrix> {
    validate_dims(m, n, d)?;
    if m == 0 {
        return Err(Error::InvalidArgument(
            "build_g_y needs M >= 1 (the M = 0 matrix is the scalar [1])".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    let index = BitString::enumerate_weight(n, m)?;
    let md = (m + d - 1) as i64;
    let entries = Matrix::from_fn(index.len(), index.len(), |i, j| {
        let x = &index[i];
        let z = &index[j];
        let xz = x.dot(z).expect("equal lengths") as i64;
        let w = x
            .complement()
            .intersection(&z.complement())
            .and_then(|u| u.intersection(y))
            .expect("equal lengths")
            .weight() as i64;
        Rat::one() / binom_rat(md - xz + w, (d - 1) as i64)
    });
    Ok(GramMatrix {
        m,
        n,
        d,
        label: GramLabel::Single(*y),
        index,
        entries,
    })
}

/// Sum of [`build_g_y`] over every weight-`L` string `x` with
/// `x·y = min(L, w_y)`; for `y = 0` this sums over all weight-`L` strings.
pub fn build_g_ml(m: usize, n: usize, d: usize, l: usize, y: &BitString) -> Result<GramMatrix> {
    validate_dims(m, n, d)?;
    if l > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= L <= N, got L={l}, N={n}"
        )));
    }
    if y.len() != n {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    let want = l.min(y.weight());
    let mut total: Option<GramMatrix> = None;
    for x in BitString::enumerate_weight(n, l)? {
        if x.dot(y)? != want {
            continue;
        }
        let g = build_g_y(m, n, d, &x)?;
        total = Some(match total {
            None => g,
            Some(t) => GramMatrix {
                entries: t.entries.add(&g.entries),
                ..t
            },
        });
    }
    let mut out = total
        .ok_or_else(|| Error::InvalidArgument("no weight-L strings compatible with y".into()))?;
    out.label = GramLabel::Aggregated { y: *y, l };
    Ok(out)
}

/// Closed-form spectrum of `G_0`: classes `k = 0..min(M, N−M)` carry
/// eigenvalue `C(d−2+k,k)·C(N+d−1,M) / (C(M+d−1,M)·C(N+d−1,k))` with
/// multiplicity `C(N,k) − C(N,k−1)`.
pub fn g0_spectrum(m: usize, n: usize, d: usize) -> Result<SpectrumReport<Rat>> {
    validate_dims(m, n, d)?;
    if m == 0 {
        return Ok(SpectrumReport {
            eigenvalues: vec![Rat::one()],
            degeneracies: vec![1],
        });
    }
    let mut eigenvalues = Vec::new();
    let mut degeneracies = Vec::new();
    for k in 0..=m.min(n - m) {
        let deg = binom_rat(n as i64, k as i64) - binom_rat(n as i64, k as i64 - 1);
        debug_assert!(deg.is_positive());
        let lam = binom_rat((d + k) as i64 - 2, k as i64) * binom_rat((n + d - 1) as i64, m as i64)
            / (binom_rat((m + d - 1) as i64, m as i64) * binom_rat((n + d - 1) as i64, k as i64));
        eigenvalues.push(lam);
        degeneracies.push(deg.to_integer().to_usize().expect("desk-scale degeneracy"));
    }
    Ok(SpectrumReport {
        eigenvalues,
        degeneracies,
    })
}

/// Group a dense symmetric eigendecomposition into a numeric spectrum
/// report, merging eigenvalues within a relative tolerance.
pub fn numeric_spectrum(mat: &Matrix<f64>, rel_tol: f64) -> SpectrumReport<f64> {
    let (vals, _) = mat.sym_eigen();
    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut degeneracies: Vec<usize> = Vec::new();
    for v in vals {
        match eigenvalues.last_mut() {
            Some(last) if (v - *last).abs() < rel_tol * v.abs().max(1.0) => {
                *last = v;
                *degeneracies.last_mut().unwrap() += 1;
            }
            _ => {
                eigenvalues.push(v);
                degeneracies.push(1);
            }
        }
    }
    SpectrumReport {
        eigenvalues,
        degeneracies,
    }
}

/// Lift the spectrum of `G_0^{(M)}` to `G_0^{(M+1)}` through the
/// one-step recursion on the entry coefficients `f_k`.
///
/// `f_m` holds `f^{(M)}_k` for `k = 0..=M` and `f_m1` holds `f^{(M+1)}_k`
/// for `k = 0..=M+1`. The ratio
/// `λ̃ = ((M+1−k)f^{(M+1)}_{k+1} + (N−2M−1+k)f^{(M+1)}_k) /
///      ((M+1−k)f^{(M)}_k + k f^{(M)}_{k−1})`
/// is evaluated at every admissible `k` and must be `k`-independent;
/// otherwise the lift is rejected. Surviving classes are multiplied by `λ̃`;
/// when a genuinely new class appears (`N > 2M+1`) its eigenvalue is
/// `(C(N,M+1)f^{(M+1)}_{M+1} − λ̃·C(N,M)f^{(M)}_M) / (C(N,M+1) − C(N,M))`.
pub fn eig_lift(
    m: usize,
    n: usize,
    spectrum: &SpectrumReport<Rat>,
    f_m: &[Rat],
    f_m1: &[Rat],
) -> Result<SpectrumReport<Rat>> {
    if n < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "cannot lift past N: M+1={} > N={n}",
            m + 1
        )));
    }
    if f_m.len() != m + 1 || f_m1.len() != m + 2 {
        return Err(Error::InvalidArgument(format!(
            "need f coefficients for k=0..=M and k=0..=M+1; got {} and {}",
            f_m.len(),
            f_m1.len()
        )));
    }
    let rat_i = |v: i64| Rat::from_integer(v.into());
    let mut lam: Option<Rat> = None;
    for k in 0..=m {
        let num = rat_i((m + 1 - k) as i64) * &f_m1[k + 1]
            + rat_i(n as i64 - 2 * m as i64 - 1 + k as i64) * &f_m1[k];
        let mut den = rat_i((m + 1 - k) as i64) * &f_m[k];
        if k > 0 {
            den += rat_i(k as i64) * &f_m[k - 1];
        }
        if den.is_zero() {
            return Err(Error::Domain("recursion ratio has zero denominator".into()));
        }
        let val = num / den;
        match &lam {
            None => lam = Some(val),
            Some(prev) if *prev != val => return Err(Error::RecursionHypothesisViolated),
            _ => {}
        }
    }
    let lam = lam.expect("at least k = 0 evaluated");

    let k_in = m.min(n - m); // largest class present at level M
    let k_out = (m + 1).min(n - m - 1); // largest class present at level M+1
    if spectrum.eigenvalues.len() < k_in.min(k_out) + 1 {
        return Err(Error::InvalidArgument(format!(
            "spectrum has {} classes; expected at least {}",
            spectrum.eigenvalues.len(),
            k_in.min(k_out) + 1
        )));
    }
    let mut eigenvalues = Vec::new();
    let mut degeneracies = Vec::new();
    for k in 0..=k_out.min(k_in) {
        eigenvalues.push(spectrum.eigenvalues[k].clone() * lam.clone());
        let deg = binom_rat(n as i64, k as i64) - binom_rat(n as i64, k as i64 - 1);
        degeneracies.push(deg.to_integer().to_usize().expect("desk-scale degeneracy"));
    }
    if k_out == m + 1 {
        // new class: only exists when C(N,M+1) > C(N,M), i.e. N > 2M+1
        let c_next = binom_rat(n as i64, (m + 1) as i64);
        let c_prev = binom_rat(n as i64, m as i64);
        let extra = (c_next.clone() * &f_m1[m + 1] - lam.clone() * c_prev.clone() * &f_m[m])
            / (c_next.clone() - c_prev.clone());
        eigenvalues.push(extra);
        degeneracies.push((c_next - c_prev).to_integer().to_usize().expect("positive"));
    }
    Ok(SpectrumReport {
        eigenvalues,
        degeneracies,
    })
}

/// The standard entry coefficients `f^{(M)}_k = 1 / C(M+d−1−k, d−1)` of the
/// `G_0` family, for `k = 0..=M`.
pub fn standard_f(m: usize, d: usize) -> Vec<Rat> {
    (0..=m)
        .map(|k| Rat::one() / binom_rat((m + d - 1) as i64 - k as i64, (d - 1) as i64))
        .collect()
}

/// Closed-form inverse of `G_0`, exact: entry
/// `(x,z) = (d+M−1)(N+d−M−1)/((d−1)(d+N−1)) · (−1)^{M+x·z} / C(d+N−2, M−x·z)`.
pub fn g0_inverse(m: usize, n: usize, d: usize) -> Result<GramMatrix> {
    if d == 1 {
        return Err(Error::Domain(
            "closed-form inverse degenerates at d = 1".into(),
        ));
    }
    validate_dims(m, n, d)?;
    if m == 0 {
        return Err(Error::InvalidArgument("g0_inverse needs M >= 1".into()));
    }
    let index = BitString::enumerate_weight(n, m)?;
    let pref = Rat::new(
        (((d + m - 1) * (n + d - m - 1)) as i64).into(),
        (((d - 1) * (d + n - 1)) as i64).into(),
    );
    let entries = Matrix::from_fn(index.len(), index.len(), |i, j| {
        let xz = index[i].dot(&index[j]).expect("equal lengths");
        let sign = if (m + xz).is_multiple_of(2) {
            Rat::one()
        } else {
            -Rat::one()
        };
        pref.clone() * sign / binom_rat((d + n) as i64 - 2, m as i64 - xz as i64)
    });
    Ok(GramMatrix {
        m,
        n,
        d,
        label: GramLabel::Single(BitString::zeros(n)),
        index,
        entries,
    })
}

/// Exact row sum of `G_0^{(M,L)}`:
/// `Σ_{i=0}^{M} C(M,i)·C(N−M,M−i)·Σ_q C(N+i−2M,q)·C(2M−i,L−q)/C(M+d−1−i+q,d−1)`.
pub fn row_sum_symmetric(m: usize, l: usize, n: usize, d: usize) -> Result<Rat> {
    validate_dims(m, n, d)?;
    if l > n {
        return Err(Error::InvalidArgument(format!(
            "need L <= N, got L={l}, N={n}"
        )));
    }
    let (mi, ni, li, di) = (m as i64, n as i64, l as i64, d as i64);
    let mut s = Rat::zero();
    for i in 0..=mi {
        let outer = binom_rat(mi, i) * binom_rat(ni - mi, mi - i);
        if outer.is_zero() {
            continue;
        }
        let mut inner = Rat::zero();
        let qmax = (ni + i - 2 * mi).max(0);
        for q in 0..=qmax {
            let num = binom_rat(ni + i - 2 * mi, q) * binom_rat(2 * mi - i, li - q);
            if num.is_zero() {
                continue;
            }
            inner += num / binom_rat(mi + di - 1 - i + q, di - 1);
        }
        s += outer * inner;
    }
    Ok(s)
}

/// Exact row sum of `G_0` itself (`k = 0` eigenvalue times nothing): equals
/// the top closed-form eigenvalue.
pub fn g0_row_sum(m: usize, n: usize, d: usize) -> Result<Rat> {
    validate_dims(m, n, d)?;
    Ok(binom_rat((n + d - 1) as i64, m as i64) / binom_rat((m + d - 1) as i64, m as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn g_y_small_examples() {
        let g = build_g_y(1, 2, 2, &bs("00")).unwrap();
        assert_eq!(g.entries[(0, 0)], rat(1, 1));
        assert_eq!(g.entries[(0, 1)], rat(1, 2));
        assert_eq!(g.entries[(1, 1)], rat(1, 1));

        // canonical row order (01, 10): a single-site label produces an
        // asymmetric diagonal
        let g = build_g_y(1, 2, 2, &bs("10")).unwrap();
        assert_eq!(g.entries[(0, 0)], rat(1, 2));
        assert_eq!(g.entries[(0, 1)], rat(1, 2));
        assert_eq!(g.entries[(1, 1)], rat(1, 1));

        let g = build_g_y(2, 2, 3, &bs("00")).unwrap();
        assert_eq!(g.size(), 1);
        assert_eq!(g.entries[(0, 0)], rat(1, 1));
    }

    #[test]
    fn g_ml_sums_singles() {
        let g = build_g_ml(1, 2, 2, 1, &bs("00")).unwrap();
        assert_eq!(g.entries[(0, 0)], rat(3, 2));
        assert_eq!(g.entries[(0, 1)], rat(1, 1));
        assert_eq!(g.entries[(1, 1)], rat(3, 2));

        // L = 2 on two sites: the single weight-2 string
        let g2 = build_g_ml(1, 2, 2, 2, &bs("00")).unwrap();
        let single = build_g_y(1, 2, 2, &bs("11")).unwrap();
        assert_eq!(g2.entries, single.entries);

        // y = 100: sum over x in {110, 101}
        let g3 = build_g_ml(1, 3, 2, 2, &bs("100")).unwrap();
        let manual = build_g_y(1, 3, 2, &bs("110"))
            .unwrap()
            .entries
            .add(&build_g_y(1, 3, 2, &bs("101")).unwrap().entries);
        assert_eq!(g3.entries, manual);
    }

    #[test]
    fn spectrum_examples() {
        let s = g0_spectrum(1, 2, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![rat(3, 2), rat(1, 2)]);
        assert_eq!(s.degeneracies, vec![1, 1]);

        let s0 = g0_spectrum(0, 5, 3).unwrap();
        assert_eq!(s0.eigenvalues, vec![rat(1, 1)]);
        assert_eq!(s0.degeneracies, vec![1]);

        let s24 = g0_spectrum(2, 4, 2).unwrap();
        assert_eq!(s24.degeneracies, vec![1, 3, 2]);
        assert_eq!(s24.total_degeneracy(), 6);

        // trace identity: sum of eigenvalue*degeneracy = trace = C(N,M) * diag
        let g = build_g_y(2, 4, 2, &bs("0000")).unwrap();
        assert_eq!(s24.weighted_sum(), g.entries.trace());
    }

    #[test]
    fn lift_matches_closed_form() {
        // M = 0 -> 1 at N = 2, d = 2
        let start = g0_spectrum(0, 2, 2).unwrap();
        let lifted = eig_lift(0, 2, &start, &standard_f(0, 2), &standard_f(1, 2)).unwrap();
        assert_eq!(lifted, g0_spectrum(1, 2, 2).unwrap());
    }

    #[test]
    fn lift_rejects_k_dependent_f() {
        let start = g0_spectrum(1, 4, 2).unwrap();
        let bad: Vec<Rat> = (1..=2).map(|k| rat(k, 1)).collect();
        let bad1: Vec<Rat> = (1..=3).map(|k| rat(k, 1)).collect();
        let err = eig_lift(1, 4, &start, &bad, &bad1).unwrap_err();
        assert_eq!(err.to_string(), "recursion hypothesis violated");
    }

    #[test]
    fn inverse_example_and_product() {
        let inv = g0_inverse(1, 2, 2).unwrap();
        assert_eq!(inv.entries[(0, 0)], rat(4, 3));
        assert_eq!(inv.entries[(0, 1)], rat(-2, 3));
        let g0 = build_g_y(1, 2, 2, &bs("00")).unwrap();
        assert_eq!(g0.entries.matmul(&inv.entries), Matrix::identity(2));
        let g3 = build_g_y(1, 3, 2, &bs("000")).unwrap();
        let inv3 = g0_inverse(1, 3, 2).unwrap();
        assert_eq!(g3.entries.matmul(&inv3.entries), Matrix::identity(3));
        assert!(matches!(g0_inverse(1, 2, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn row_sums_exact() {
        assert_eq!(row_sum_symmetric(1, 1, 2, 2).unwrap(), rat(5, 2));
        // top eigenvalue of G_0 equals its row sum for M,N <= 6
        for d in [2usize, 3] {
            for n in 1..=6 {
                for m in 1..=n {
                    let s = g0_spectrum(m, n, d).unwrap();
                    assert_eq!(s.eigenvalues[0], g0_row_sum(m, n, d).unwrap());
                }
            }
        }
    }

    #[test]
    fn dump_json_shape() {
        let g = build_g_y(1, 2, 2, &bs("00")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.dump_json()).unwrap();
        assert_eq!(v["M"], 1);
        assert_eq!(v["y"], "00");
        assert_eq!(v["rows"][0][1], "1/2");
    }
}
