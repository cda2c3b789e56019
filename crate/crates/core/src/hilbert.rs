//! Brute-force dense oracle on `(C^d)^{⊗n}`.
//!
//! Builds symmetric projectors, spin operators, Choi operators `R`, and the
//! Bell-type states `ψ_x`/`χ` explicitly, so every closed form in the exact
//! layers can be cross-checked by direct linear algebra. Deliberately
//! unoptimized: sizes are guarded by a dimension budget
//! (`CLONETRADE_MAX_DIM`, default 10000).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::bitstrings::{binom_rat, BitString};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::{CplxMatrix, RealMatrix};

/// Upper bound on dense dimensions, overridable via `CLONETRADE_MAX_DIM`.
pub const DEFAULT_MAX_DIM: usize = 10_000;

fn max_dim() -> usize {
    std::env::var("CLONETRADE_MAX_DIM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// `d^n` guarded by the dimension budget.
pub fn checked_dim(n_sites: usize, d: usize) -> Result<usize> {
    let limit = max_dim();
    let mut dim = 1u128;
    for _ in 0..n_sites {
        dim *= d as u128;
        if dim > limit as u128 {
            return Err(Error::BudgetExceeded {
                requested: dim.min(usize::MAX as u128) as usize,
                limit,
            });
        }
    }
    Ok(dim as usize)
}

fn digits_of(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &dd) in out.iter_mut().zip(dims).rev() {
        *slot = idx % dd;
        idx /= dd;
    }
    out
}

fn index_of(digs: &[usize], dims: &[usize]) -> usize {
    digs.iter().zip(dims).fold(0, |acc, (&v, &dd)| acc * dd + v)
}

/// Dense operator on a tensor product of local spaces; site 0 is the
/// leftmost (most significant) tensor factor.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub dims: Vec<usize>,
    pub mat: CplxMatrix,
}

impl DenseOperator {
    pub fn new(dims: Vec<usize>, mat: CplxMatrix) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::LengthMismatch(dim, mat.nrows()));
        }
        Ok(Self { dims, mat })
    }

    pub fn from_real(dims: Vec<usize>, mat: &RealMatrix) -> Result<Self> {
        Self::new(dims, mat.map(|v| Complex64::new(*v, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    /// Local dimension, when uniform across sites.
    pub fn local_dim(&self) -> Result<usize> {
        let d = *self
            .dims
            .first()
            .ok_or_else(|| Error::InvalidArgument("operator has no sites".into()))?;
        if self.dims.iter().any(|&x| x != d) {
            return Err(Error::InvalidArgument(
                "operation requires uniform local dimensions".into(),
            ));
        }
        Ok(d)
    }

    pub fn herm_residual(&self) -> f64 {
        self.mat.max_abs_diff(&self.mat.conj_transpose())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::LengthMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            dims: self.dims.clone(),
            mat: self.mat.add(&other.mat),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.scale(&Complex64::new(s, 0.0)),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::LengthMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            dims: self.dims.clone(),
            mat: self.mat.matmul(&other.mat),
        })
    }

    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        if self.dims != state.dims {
            return Err(Error::LengthMismatch(self.dim(), state.dim()));
        }
        Ok(DenseState {
            dims: state.dims.clone(),
            amp: self.mat.mul_vec(&state.amp),
        })
    }

    /// Real part, erroring if any imaginary part exceeds `tol`.
    pub fn to_real(&self, tol: f64) -> Result<RealMatrix> {
        if self.mat.max_imag() > tol {
            return Err(Error::Domain(
                "operator has non-negligible imaginary entries".into(),
            ));
        }
        Ok(self.mat.re())
    }
}

/// Dense state vector on a tensor product of local spaces.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub dims: Vec<usize>,
    pub amp: Vec<Complex64>,
}

impl DenseState {
    pub fn new(dims: Vec<usize>, amp: Vec<Complex64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if amp.len() != dim {
            return Err(Error::LengthMismatch(dim, amp.len()));
        }
        Ok(Self { dims, amp })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let dim = dims.iter().product();
        Self {
            dims,
            amp: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_real(dims: Vec<usize>, amp: &[f64]) -> Result<Self> {
        Self::new(dims, amp.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩` with the conjugate on `self`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::LengthMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn normalized(&self) -> Result<DenseState> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        Ok(DenseState {
            dims: self.dims.clone(),
            amp: self.amp.iter().map(|c| c / n).collect(),
        })
    }

    pub fn add_scaled(&mut self, coeff: Complex64, other: &DenseState) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::LengthMismatch(self.dim(), other.dim()));
        }
        for (a, b) in self.amp.iter_mut().zip(&other.amp) {
            *a += coeff * b;
        }
        Ok(())
    }
}

/// Orthonormal Dicke-type basis of the symmetric subspace, in sorted-word
/// order (for d = 2 this is ascending excitation number). Each vector is an
/// eigenvector of the collective `J_Z`.
#[derive(Clone, Debug)]
pub struct SymBasis {
    pub n: usize,
    pub d: usize,
    pub vectors: Vec<DenseState>,
}

/// Group the computational-basis indices of `(C^d)^{⊗n}` by digit multiset,
/// in lexicographic order of the sorted digit word.
fn multiset_groups(n: usize, d: usize) -> Result<Vec<Vec<usize>>> {
    let dim = checked_dim(n, d)?;
    let dims = vec![d; n];
    let mut map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for idx in 0..dim {
        let mut key = digits_of(idx, &dims);
        key.sort_unstable();
        map.entry(key).or_default().push(idx);
    }
    let mut pairs: Vec<_> = map.into_iter().collect();
    pairs.sort();
    Ok(pairs.into_iter().map(|(_, v)| v).collect())
}

fn validate_sites(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "local dimension must satisfy d >= 2, got {d}"
        )));
    }
    Ok(())
}

type ProjectorCache = Mutex<HashMap<(usize, usize), Arc<DenseOperator>>>;
static PROJECTOR_CACHE: OnceLock<ProjectorCache> = OnceLock::new();

/// Projector onto the symmetric subspace of `(C^d)^{⊗n}`: the average of
/// all site-permutation matrices. Entry `(a,b)` is `1/|orbit|` when `a` and
/// `b` have the same digit multiset and 0 otherwise. Cached per `(n, d)`.
pub fn sym_projector(n: usize, d: usize) -> Result<Arc<DenseOperator>> {
    validate_sites(n, d)?;
    let dim = checked_dim(n, d)?;
    let cache = PROJECTOR_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&(n, d)) {
        return Ok(p.clone());
    }
    let mut mat = CplxMatrix::zeros(dim, dim);
    for group in multiset_groups(n, d)? {
        let w = Complex64::new(1.0 / group.len() as f64, 0.0);
        for &a in &group {
            for &b in &group {
                mat[(a, b)] = w;
            }
        }
    }
    let op = Arc::new(DenseOperator {
        dims: vec![d; n],
        mat,
    });
    cache
        .lock()
        .unwrap()
        .entry((n, d))
        .or_insert_with(|| op.clone());
    Ok(op)
}

/// Orthonormal basis of the symmetric subspace: one normalized orbit sum
/// per digit multiset.
pub fn sym_basis(n: usize, d: usize) -> Result<SymBasis> {
    validate_sites(n, d)?;
    let dim = checked_dim(n, d)?;
    let mut vectors = Vec::new();
    for group in multiset_groups(n, d)? {
        let a = 1.0 / (group.len() as f64).sqrt();
        let mut amp = vec![Complex64::new(0.0, 0.0); dim];
        for &idx in &group {
            amp[idx] = Complex64::new(a, 0.0);
        }
        vectors.push(DenseState {
            dims: vec![d; n],
            amp,
        });
    }
    Ok(SymBasis { n, d, vectors })
}

/// Single-site spin operators `(S_X, S_Y, S_Z)` on `C^d`:
/// `S_Z = diag(d−1−2n)` and `S_X ± iS_Y` the usual ladder pair with
/// off-diagonal entries `√((n+1)(d−1−n))`.
pub fn spin_operators(d: usize) -> Result<(DenseOperator, DenseOperator, DenseOperator)> {
    validate_sites(1, d)?;
    let mut sx = CplxMatrix::zeros(d, d);
    let mut sy = CplxMatrix::zeros(d, d);
    let mut sz = CplxMatrix::zeros(d, d);
    for n in 0..d {
        sz[(n, n)] = Complex64::new((d - 1) as f64 - 2.0 * n as f64, 0.0);
        if n + 1 < d {
            let c = (((n + 1) * (d - 1 - n)) as f64).sqrt();
            sx[(n, n + 1)] = Complex64::new(c, 0.0);
            sx[(n + 1, n)] = Complex64::new(c, 0.0);
            sy[(n, n + 1)] = Complex64::new(0.0, -c);
            sy[(n + 1, n)] = Complex64::new(0.0, c);
        }
    }
    let dims = vec![d];
    Ok((
        DenseOperator::new(dims.clone(), sx)?,
        DenseOperator::new(dims.clone(), sy)?,
        DenseOperator::new(dims, sz)?,
    ))
}

/// Collective spin operators `(J_X, J_Y, J_Z, J²)` on `n` sites.
pub fn total_spin(
    n: usize,
    d: usize,
) -> Result<(DenseOperator, DenseOperator, DenseOperator, DenseOperator)> {
    let (sx, sy, sz) = spin_operators(d)?;
    let mut totals = Vec::new();
    for s in [&sx, &sy, &sz] {
        let mut j: Option<DenseOperator> = None;
        for site in 0..n {
            let e = embed_op(s, &[site], n)?;
            j = Some(match j {
                None => e,
                Some(acc) => acc.add(&e)?,
            });
        }
        totals.push(j.expect("n >= 1"));
    }
    let jz = totals.pop().expect("three components");
    let jy = totals.pop().expect("three components");
    let jx = totals.pop().expect("three components");
    let j2 = jx
        .matmul(&jx)?
        .add(&jy.matmul(&jy)?)?
        .add(&jz.matmul(&jz)?)?;
    Ok((jx, jy, jz, j2))
}

/// Embed an operator acting on the listed sites (strictly ascending,
/// 0-based from the left) into `total_sites` sites, acting as identity
/// elsewhere. Local dimensions must be uniform.
pub fn embed_op(op: &DenseOperator, sites: &[usize], total_sites: usize) -> Result<DenseOperator> {
    let d = op.local_dim()?;
    if sites.len() != op.n_sites() {
        return Err(Error::LengthMismatch(op.n_sites(), sites.len()));
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) || sites.iter().any(|&s| s >= total_sites) {
        return Err(Error::InvalidArgument(
            "embedding sites must be strictly ascending and in range".into(),
        ));
    }
    let dim = checked_dim(total_sites, d)?;
    let k = sites.len();
    let other: Vec<usize> = (0..total_sites).filter(|s| !sites.contains(s)).collect();
    // positional weight of each site in the global index
    let weight = |s: usize| d.pow((total_sites - 1 - s) as u32);
    let sub_dims = vec![d; k];
    let rest_dims = vec![d; total_sites - k];
    let sub_offsets: Vec<usize> = (0..d.pow(k as u32))
        .map(|ia| {
            digits_of(ia, &sub_dims)
                .iter()
                .zip(sites)
                .map(|(&dig, &s)| dig * weight(s))
                .sum()
        })
        .collect();
    let rest_offsets: Vec<usize> = (0..d.pow((total_sites - k) as u32))
        .map(|ir| {
            digits_of(ir, &rest_dims)
                .iter()
                .zip(&other)
                .map(|(&dig, &s)| dig * weight(s))
                .sum()
        })
        .collect();
    let mut mat = CplxMatrix::zeros(dim, dim);
    for &r in &rest_offsets {
        for (ia, &a) in sub_offsets.iter().enumerate() {
            for (ib, &b) in sub_offsets.iter().enumerate() {
                let v = op.mat[(ia, ib)];
                if v != Complex64::new(0.0, 0.0) {
                    mat[(a + r, b + r)] = v;
                }
            }
        }
    }
    DenseOperator::new(vec![d; total_sites], mat)
}

/// Transpose the tensor factors flagged by `sites`, leaving the rest alone.
/// Involutive; the full-flag case is the ordinary matrix transpose.
pub fn partial_transpose(op: &DenseOperator, sites: &BitString) -> Result<DenseOperator> {
    if sites.len() != op.n_sites() {
        return Err(Error::LengthMismatch(op.n_sites(), sites.len()));
    }
    let dims = op.dims.clone();
    let dim = op.dim();
    let mut mat = CplxMatrix::zeros(dim, dim);
    for a in 0..dim {
        let da = digits_of(a, &dims);
        for b in 0..dim {
            let db = digits_of(b, &dims);
            let mut na = da.clone();
            let mut nb = db.clone();
            for i in 0..dims.len() {
                if sites.bit(i) {
                    na[i] = db[i];
                    nb[i] = da[i];
                }
            }
            mat[(index_of(&na, &dims), index_of(&nb, &dims))] = op.mat[(a, b)];
        }
    }
    DenseOperator::new(dims, mat)
}

/// Choi operator of a cloning transformation on `M` input + `N` output
/// sites (inputs first).
#[derive(Clone, Debug)]
pub struct ChoiOperator {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub op: DenseOperator,
}

/// The single-label building block: partial transpose over the `M` input
/// sites of the scaled symmetric projector on IN ∪ sites(x), embedded in
/// `M+N` sites.
pub fn r_x(m: usize, n: usize, d: usize, x: &BitString) -> Result<DenseOperator> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "need M >= 1 inputs and N >= 1 outputs".into(),
        ));
    }
    if x.len() != n {
        return Err(Error::LengthMismatch(n, x.len()));
    }
    let w = x.weight();
    checked_dim(m + n, d)?;
    let p = sym_projector(m + w, d)?;
    let scale = (binom_rat((m + d - 1) as i64, m as i64)
        / binom_rat((m + w + d - 1) as i64, (m + w) as i64))
    .to_f64()
    .expect("finite scale");
    let mut sites: Vec<usize> = (0..m).collect();
    sites.extend(x.sites().into_iter().map(|s| m + s));
    let embedded = embed_op(&p.scale(scale), &sites, m + n)?;
    let in_mask = BitString::from_sites(m + n, &(0..m).collect::<Vec<_>>())?;
    partial_transpose(&embedded, &in_mask)
}

/// `R = Σ_x α_x R_x` for a weight assignment over output labels. Weights
/// must be non-negative and sum to 1 within 1e−9.
pub fn build_r(
    m: usize,
    n: usize,
    d: usize,
    weights: &BTreeMap<BitString, f64>,
) -> Result<ChoiOperator> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("weight map is empty".into()));
    }
    let mut total = 0.0;
    for (x, &a) in weights {
        if x.len() != n {
            return Err(Error::LengthMismatch(n, x.len()));
        }
        if a < -1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weight for {x} is negative: {a}"
            )));
        }
        total += a;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "weights must sum to 1, got {total}"
        )));
    }
    let mut op: Option<DenseOperator> = None;
    for (x, &a) in weights {
        if a.abs() < 1e-300 {
            continue;
        }
        let term = r_x(m, n, d, x)?.scale(a.max(0.0));
        op = Some(match op {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    Ok(ChoiOperator {
        m,
        n,
        d,
        op: op.expect("non-empty weights"),
    })
}

/// Dominant eigenpair of a Hermitian operator. The eigenvector is
/// phase-fixed so its largest-magnitude entry (lowest index on ties) is
/// positive real.
pub fn max_eig(op: &DenseOperator) -> Result<(f64, DenseState)> {
    let scale = op.mat.max_abs().max(1.0);
    if op.herm_residual() > 1e-9 * scale {
        return Err(Error::InvalidArgument("operator is not Hermitian".into()));
    }
    let (vals, vecs) = op.mat.hermitian_eigen();
    let top = vals.len() - 1;
    let mut amp: Vec<Complex64> = (0..op.dim()).map(|i| vecs[(i, top)]).collect();
    let mut j = 0;
    for (i, c) in amp.iter().enumerate() {
        if c.norm() > amp[j].norm() {
            j = i;
        }
    }
    let a = amp[j];
    if a.norm() > 0.0 {
        let phase = a / a.norm();
        for c in amp.iter_mut() {
            *c /= phase;
        }
    }
    Ok((
        vals[top],
        DenseState {
            dims: op.dims.clone(),
            amp,
        },
    ))
}

fn check_symmetric_state(phi: &DenseState, d: usize) -> Result<()> {
    let p = sym_projector(phi.n_sites(), d)?;
    let proj = p.apply(phi)?;
    let residual: f64 = proj
        .amp
        .iter()
        .zip(&phi.amp)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-10 {
        return Err(Error::Domain(format!(
            "state is not symmetric (projector residual {residual:.2e})"
        )));
    }
    Ok(())
}

/// The state `|B_x⟩|Φ⟩_{x̄}` on `M+N` sites: a normalized Bell pairing of
/// the `M` inputs with the `x`-flagged outputs, tensored with the symmetric
/// state `Φ` on the remaining outputs.
pub fn build_psi_x(
    m: usize,
    n: usize,
    d: usize,
    x: &BitString,
    phi: &DenseState,
) -> Result<DenseState> {
    if x.len() != n {
        return Err(Error::LengthMismatch(n, x.len()));
    }
    if x.weight() != m {
        return Err(Error::InvalidArgument(format!(
            "label weight {} must equal M = {m}",
            x.weight()
        )));
    }
    if phi.n_sites() != n - m || phi.dims.iter().any(|&dd| dd != d) {
        return Err(Error::LengthMismatch(n - m, phi.n_sites()));
    }
    check_symmetric_state(phi, d)?;
    checked_dim(m + n, d)?;
    let basis = sym_basis(m, d)?;
    let x_sites = x.sites();
    let xbar_sites = x.complement().sites();
    let dim_in = d.pow(m as u32);
    let dim_out = d.pow(n as u32);
    let m_dims = vec![d; m];
    let c_dims = vec![d; n - m];
    let out_dims = vec![d; n];
    let norm = 1.0
        / binom_rat((m + d - 1) as i64, m as i64)
            .to_f64()
            .expect("finite")
            .sqrt();
    let mut amp = vec![Complex64::new(0.0, 0.0); dim_in * dim_out];
    let phi_support: Vec<(usize, Complex64)> = phi
        .amp
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, *c))
        .collect();
    for dicke in &basis.vectors {
        let support: Vec<(usize, Complex64)> = dicke
            .amp
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| (i, *c))
            .collect();
        for &(ia, ca) in &support {
            for &(ib, cb) in &support {
                let digs_b = digits_of(ib, &m_dims);
                for &(ic, cc) in &phi_support {
                    let digs_c = digits_of(ic, &c_dims);
                    let mut out_digs = vec![0usize; n];
                    for (k, &s) in x_sites.iter().enumerate() {
                        out_digs[s] = digs_b[k];
                    }
                    for (k, &s) in xbar_sites.iter().enumerate() {
                        out_digs[s] = digs_c[k];
                    }
                    let io = index_of(&out_digs, &out_dims);
                    amp[ia * dim_out + io] += norm * ca * cb * cc;
                }
            }
        }
    }
    DenseState::new(vec![d; m + n], amp)
}

/// `χ = Σ_x β_x ψ_x` over weight-`M` labels; not normalized (its squared
/// norm equals `βᵀ G_0 β`).
pub fn build_chi(
    m: usize,
    n: usize,
    d: usize,
    betas: &BTreeMap<BitString, f64>,
    phi: &DenseState,
) -> Result<DenseState> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("coefficient map is empty".into()));
    }
    let mut chi = DenseState::zeros(vec![d; m + n]);
    for (x, &b) in betas {
        let psi = build_psi_x(m, n, d, x, phi)?;
        chi.add_scaled(Complex64::new(b, 0.0), &psi)?;
    }
    Ok(chi)
}

/// `⟨χ| R_y |χ⟩` — the fidelity the label `y` assigns to the transformation
/// encoded by `χ`.
pub fn fidelity_direct(
    chi: &DenseState,
    m: usize,
    n: usize,
    d: usize,
    y: &BitString,
) -> Result<f64> {
    let r = r_x(m, n, d, y)?;
    if chi.dims != r.dims {
        return Err(Error::LengthMismatch(r.dim(), chi.dim()));
    }
    let val = r.mat.quad_form(&chi.amp);
    Ok(val.re)
}

/// `(1/√d) Σ_i |i⟩^{⊗n}`.
pub fn ghz_phi(n: usize, d: usize) -> Result<DenseState> {
    validate_sites(n, d)?;
    let dim = checked_dim(n, d)?;
    let mut amp = vec![Complex64::new(0.0, 0.0); dim];
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        let mut idx = 0usize;
        for _ in 0..n {
            idx = idx * d + i;
        }
        amp[idx] = Complex64::new(a, 0.0);
    }
    DenseState::new(vec![d; n], amp)
}

/// Maximally entangled two-site state `(1/√d) Σ_i |ii⟩`.
pub fn bell_state(d: usize) -> Result<DenseState> {
    ghz_phi(2, d)
}

/// Norm of the projected state `η_{x,y}`: apply the symmetric projector
/// over the output sites in `x ∪ y` to `ψ_y` and rescale by the closed-form
/// prefactor. Contract: the result is 1 for all weight-`M` labels and all
/// symmetric `Φ`. Uses a uniform-superposition `Φ`; see
/// [`eta_norm_check_with`] to supply one.
pub fn eta_norm_check(m: usize, n: usize, d: usize, x: &BitString, y: &BitString) -> Result<f64> {
    let phi = ghz_phi(n - m, d)?;
    eta_norm_check_with(m, n, d, x, y, &phi)
}

/// [`eta_norm_check`] with an explicit symmetric `Φ` on `N−M` sites.
pub fn eta_norm_check_with(
    m: usize,
    n: usize,
    d: usize,
    x: &BitString,
    y: &BitString,
    phi: &DenseState,
) -> Result<f64> {
    if x.len() != n || y.len() != n {
        return Err(Error::LengthMismatch(n, x.len().max(y.len())));
    }
    if x.weight() != m || y.weight() != m {
        return Err(Error::InvalidArgument(
            "both labels must have weight M".into(),
        ));
    }
    let psi = build_psi_x(m, n, d, y, phi)?;
    let union = x.union(y)?;
    let sites: Vec<usize> = union.sites().into_iter().map(|s| m + s).collect();
    let p = sym_projector(sites.len(), d)?;
    let e = embed_op(&p, &sites, m + n)?;
    let projected = e.apply(&psi)?;
    let k = x.dot(y)? as i64;
    let wx = x.weight() as i64;
    let pref = (binom_rat((m + d - 1) as i64, m as i64)
        * binom_rat(wx - k + d as i64 - 1, d as i64 - 1)
        / binom_rat(wx + m as i64 - k + d as i64 - 1, d as i64 - 1))
    .to_f64()
    .expect("finite")
    .sqrt();
    Ok(pref * projected.norm())
}

/// Max commutator residual of the partially transposed, scaled symmetric
/// projector on `M+w` sites against the rotated collective `J_Z` and `J²`,
/// where the rotation applies `U_I = Σ_q (−1)^q |q⟩⟨d−1−q|` on each of the
/// `M` input sites. Contract: < 1e−10.
pub fn commutator_check(m: usize, w: usize, d: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("need M >= 1".into()));
    }
    let n_sites = m + w;
    checked_dim(n_sites, d)?;
    let p = sym_projector(n_sites, d)?;
    let scale = (binom_rat((m + d - 1) as i64, m as i64)
        / binom_rat((m + w + d - 1) as i64, (m + w) as i64))
    .to_f64()
    .expect("finite");
    let in_mask = BitString::from_sites(n_sites, &(0..m).collect::<Vec<_>>())?;
    let rho = partial_transpose(&p.scale(scale), &in_mask)?;
    let (_, _, jz, j2) = total_spin(n_sites, d)?;
    let mut ui = CplxMatrix::zeros(d, d);
    for q in 0..d {
        let s = if q % 2 == 0 { 1.0 } else { -1.0 };
        ui[(q, d - 1 - q)] = Complex64::new(s, 0.0);
    }
    let ui = DenseOperator::new(vec![d], ui)?;
    let mut u = embed_op(&ui, &[0], n_sites)?;
    for s in 1..m {
        u = u.matmul(&embed_op(&ui, &[s], n_sites)?)?;
    }
    let udag = DenseOperator {
        dims: u.dims.clone(),
        mat: u.mat.conj_transpose(),
    };
    let mut residual = 0.0f64;
    for j in [&jz, &j2] {
        let rotated = u.matmul(j)?.matmul(&udag)?;
        let comm = rho
            .matmul(&rotated)?
            .mat
            .max_abs_diff(&rotated.matmul(&rho)?.mat);
        residual = residual.max(comm);
    }
    Ok(residual)
}

/// Diagonal of the rotated collective `J_Z` on `M+N` sites: each basis
/// index gets `−Σ_IN (d−1−2a_i) + Σ_OUT (d−1−2b_j)`.
pub fn jz_rotated_diagonal(m: usize, n: usize, d: usize) -> Result<Vec<i64>> {
    let dim = checked_dim(m + n, d)?;
    let dims = vec![d; m + n];
    let mut t = Vec::with_capacity(dim);
    for idx in 0..dim {
        let digs = digits_of(idx, &dims);
        let mut v = 0i64;
        for (i, &dig) in digs.iter().enumerate() {
            let s = d as i64 - 1 - 2 * dig as i64;
            v += if i < m { -s } else { s };
        }
        t.push(v);
    }
    Ok(t)
}

/// Within every eigenspace of the rotated `J_Z`, the dominant eigenvector
/// of `R` (sign-fixed by its largest-magnitude entry) must have all
/// amplitudes ≥ −1e−10. Returns whether that holds for every block.
pub fn lieb_mattis_check(r: &ChoiOperator) -> Result<bool> {
    let t = jz_rotated_diagonal(r.m, r.n, r.d)?;
    let re = r.op.to_real(1e-10)?;
    let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (idx, &val) in t.iter().enumerate() {
        blocks.entry(val).or_default().push(idx);
    }
    for idx in blocks.values() {
        let sub = Matrix::from_fn(idx.len(), idx.len(), |i, j| re[(idx[i], idx[j])]);
        let (_, vecs) = sub.sym_eigen();
        let top = idx.len() - 1;
        let mut v: Vec<f64> = (0..idx.len()).map(|i| vecs[(i, top)]).collect();
        let mut jmax = 0;
        for (i, &c) in v.iter().enumerate() {
            if c.abs() > v[jmax].abs() {
                jmax = i;
            }
        }
        if v[jmax] < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
        if v.iter().any(|&c| c < -1e-10) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the reduced state of the symmetric `Φ` on its first `M` sites
/// is the maximally mixed state on the symmetric subspace,
/// `P_sym / binom(M+d−1, M)`, entrywise within 1e−10.
pub fn phi_trace_check(phi: &DenseState, m: usize) -> Result<bool> {
    let n_sites = phi.n_sites();
    if m > n_sites {
        return Err(Error::InvalidArgument(format!(
            "cannot keep {m} of {n_sites} sites"
        )));
    }
    let d = *phi
        .dims
        .first()
        .ok_or_else(|| Error::InvalidArgument("state has no sites".into()))?;
    if phi.dims.iter().any(|&dd| dd != d) {
        return Err(Error::InvalidArgument(
            "phi_trace_check requires uniform local dimensions".into(),
        ));
    }
    check_symmetric_state(phi, d)?;
    let dim_keep = d.pow(m as u32);
    let dim_rest = d.pow((n_sites - m) as u32);
    // reduced state: reshape to dim_keep x dim_rest and contract
    let mut red = CplxMatrix::zeros(dim_keep, dim_keep);
    for i in 0..dim_keep {
        for j in 0..dim_keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim_rest {
                acc += phi.amp[i * dim_rest + k] * phi.amp[j * dim_rest + k].conj();
            }
            red[(i, j)] = acc;
        }
    }
    let p = sym_projector(m, d)?;
    let norm = binom_rat((m + d - 1) as i64, m as i64)
        .to_f64()
        .expect("finite");
    let target = p.scale(1.0 / norm);
    Ok(red.max_abs_diff(&target.mat) < 1e-10)
}

/// A pseudorandom real symmetric state on `n` sites: project a seeded
/// random vector onto the symmetric subspace and normalize.
pub fn random_symmetric_state(n: usize, d: usize, rng: &mut impl rand::Rng) -> Result<DenseState> {
    let dim = checked_dim(n, d)?;
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
    let state = DenseState::from_real(vec![d; n], &raw)?;
    let p = sym_projector(n, d)?;
    p.apply(&state)?.normalized()
}

/// Numeric rank of a projector-like operator: eigenvalues above 1/2.
pub fn projector_rank(op: &DenseOperator) -> Result<usize> {
    let scale = op.mat.max_abs().max(1.0);
    if op.herm_residual() > 1e-9 * scale {
        return Err(Error::InvalidArgument("operator is not Hermitian".into()));
    }
    let (vals, _) = op.mat.hermitian_eigen();
    Ok(vals.iter().filter(|&&v| v > 0.5).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstrings::binom_usize;
    use crate::gram::{build_g_y, g0_spectrum};
    use crate::rat;
    use rand::{Rng, SeedableRng};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn projector_is_idempotent_with_exact_trace() {
        for (n, d) in [(1usize, 2usize), (2, 2), (3, 2), (2, 3), (3, 3)] {
            let p = sym_projector(n, d).unwrap();
            let p2 = p.matmul(&p).unwrap();
            assert!(p2.mat.max_abs_diff(&p.mat) < 1e-11, "P^2 = P at ({n},{d})");
            let tr = p.mat.trace().re;
            let expect = binom_usize(n + d - 1, n) as f64;
            assert!((tr - expect).abs() < 1e-9);
            assert_eq!(projector_rank(&p).unwrap(), binom_usize(n + d - 1, n));
            // non-negative entries in the computational basis
            assert!((0..p.dim()).all(|i| (0..p.dim()).all(|j| p.mat[(i, j)].re >= 0.0)));
        }
        assert_eq!(
            sym_projector(1, 3)
                .unwrap()
                .mat
                .max_abs_diff(&CplxMatrix::identity(3)),
            0.0
        );
    }

    #[test]
    fn basis_is_orthonormal_jz_eigen() {
        let b = sym_basis(3, 2).unwrap();
        assert_eq!(b.vectors.len(), 4);
        for (i, u) in b.vectors.iter().enumerate() {
            for (j, v) in b.vectors.iter().enumerate() {
                let ip = u.inner(v).unwrap().re;
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12);
            }
        }
        // d=2 order is ascending excitation: |000>, W, W-bar, |111>
        assert!((b.vectors[0].amp[0].re - 1.0).abs() < 1e-12);
        assert!((b.vectors[3].amp[7].re - 1.0).abs() < 1e-12);
        // each vector is a J_Z eigenvector
        let (_, _, jz, j2) = total_spin(3, 2).unwrap();
        for v in &b.vectors {
            let jv = jz.apply(v).unwrap();
            let lam = v.inner(&jv).unwrap().re;
            let mut dev = 0.0f64;
            for (a, b) in jv.amp.iter().zip(&v.amp) {
                dev = dev.max((a - b * lam).norm());
            }
            assert!(dev < 1e-12);
        }
        // [J_Z, J^2] = 0
        let c = jz
            .matmul(&j2)
            .unwrap()
            .mat
            .max_abs_diff(&j2.matmul(&jz).unwrap().mat);
        assert!(c < 1e-10);
    }

    #[test]
    fn spin_operator_entries() {
        let (sx, _, sz) = spin_operators(2).unwrap();
        assert_eq!(sz.mat[(0, 0)].re, 1.0);
        assert_eq!(sz.mat[(1, 1)].re, -1.0);
        assert_eq!(sx.mat[(0, 1)].re, 1.0);
        let (sx3, _, _) = spin_operators(3).unwrap();
        assert!((sx3.mat[(0, 1)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((sx3.mat[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_involutive_and_full() {
        let p = sym_projector(2, 2).unwrap();
        let full = bs("11");
        let t = partial_transpose(&p, &full).unwrap();
        assert!(t.mat.max_abs_diff(&p.mat.transpose()) < 1e-15);
        let one = bs("10");
        let once = partial_transpose(&p, &one).unwrap();
        let twice = partial_transpose(&once, &one).unwrap();
        assert!(twice.mat.max_abs_diff(&p.mat) < 1e-15);
    }

    #[test]
    fn twirl_identity() {
        for d in [2usize, 3] {
            let p = sym_projector(2, d).unwrap();
            let scaled = p.scale(2.0 / (d * (d + 1)) as f64);
            let lhs = partial_transpose(&scaled, &bs("10")).unwrap();
            let b = bell_state(d).unwrap();
            let dim = d * d;
            let mut rhs = CplxMatrix::zeros(dim, dim);
            for i in 0..dim {
                rhs[(i, i)] = Complex64::new(1.0 / (d * (d + 1)) as f64, 0.0);
                for j in 0..dim {
                    rhs[(i, j)] += b.amp[i] * b.amp[j].conj() / (d + 1) as f64;
                }
            }
            assert!(lhs.mat.max_abs_diff(&rhs) < 1e-12, "twirl at d={d}");
        }
    }

    #[test]
    fn transpose_lemma_on_bell_state() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in [2usize, 3] {
            let b = bell_state(d).unwrap();
            for _ in 0..20 {
                let a = CplxMatrix::from_fn(d, d, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                // (A^T ⊗ I)|B> vs (I ⊗ A)|B>
                let mut lhs = vec![Complex64::new(0.0, 0.0); d * d];
                let mut rhs = vec![Complex64::new(0.0, 0.0); d * d];
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            lhs[i * d + j] += a[(k, i)] * b.amp[k * d + j];
                            rhs[i * d + j] += a[(j, k)] * b.amp[i * d + k];
                        }
                    }
                }
                for (l, r) in lhs.iter().zip(&rhs) {
                    assert!((l - r).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn r_matrix_max_eigs() {
        // teleport to the only output
        let mut w = BTreeMap::new();
        w.insert(bs("1"), 1.0);
        let r = build_r(1, 1, 2, &w).unwrap();
        let (val, _) = max_eig(&r.op).unwrap();
        assert!((val - 1.0).abs() < 1e-8);

        // symmetric 1->2
        let mut w = BTreeMap::new();
        w.insert(bs("10"), 0.5);
        w.insert(bs("01"), 0.5);
        let r = build_r(1, 2, 2, &w).unwrap();
        let (val, _) = max_eig(&r.op).unwrap();
        assert!((val - 5.0 / 6.0).abs() < 1e-8);
        assert!(r.op.herm_residual() < 1e-12);
        // non-negative entries
        assert!((0..r.op.dim()).all(|i| (0..r.op.dim()).all(|j| r.op.mat[(i, j)].re >= -1e-15)));

        // all weight on the first output: perfect single clone
        let mut w = BTreeMap::new();
        w.insert(bs("10"), 1.0);
        w.insert(bs("01"), 0.0);
        let r = build_r(1, 2, 2, &w).unwrap();
        let (val, _) = max_eig(&r.op).unwrap();
        assert!((val - 1.0).abs() < 1e-8);

        // symmetric 2->3 single-site targets
        let mut w = BTreeMap::new();
        for s in ["100", "010", "001"] {
            w.insert(bs(s), 1.0 / 3.0);
        }
        let r = build_r(2, 3, 2, &w).unwrap();
        let (val, _) = max_eig(&r.op).unwrap();
        assert!((val - 11.0 / 12.0).abs() < 1e-8);
    }

    #[test]
    fn psi_inner_products_match_closed_form() {
        // <psi_x|psi_z> = 1 / binom(M - x.z + d - 1, d - 1)
        let phi = ghz_phi(2, 2).unwrap();
        let xs = BitString::enumerate_weight(4, 2).unwrap();
        for x in &xs {
            for z in &xs {
                let px = build_psi_x(2, 4, 2, x, &phi).unwrap();
                let pz = build_psi_x(2, 4, 2, z, &phi).unwrap();
                let ip = px.inner(&pz).unwrap().re;
                let k = x.dot(z).unwrap() as i64;
                let expect = 1.0 / binom_rat(2 - k + 1, 1).to_f64().unwrap();
                assert!((ip - expect).abs() < 1e-10, "x={x} z={z}");
            }
        }
    }

    #[test]
    fn chi_norm_equals_gram_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let phi = ghz_phi(2, 2).unwrap();
        let labels = BitString::enumerate_weight(3, 1).unwrap();
        let g0 = build_g_y(1, 3, 2, &bs("000")).unwrap();
        for _ in 0..5 {
            let beta: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut map = BTreeMap::new();
            for (x, &b) in labels.iter().zip(&beta) {
                map.insert(*x, b);
            }
            let chi = build_chi(1, 3, 2, &map, &phi).unwrap();
            let form = g0.quad_form_f64(&beta);
            assert!((chi.norm().powi(2) - form).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_direct_equals_gram_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let phi = ghz_phi(2, 2).unwrap();
        let labels = BitString::enumerate_weight(3, 1).unwrap();
        for _ in 0..5 {
            let beta: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut map = BTreeMap::new();
            for (x, &b) in labels.iter().zip(&beta) {
                map.insert(*x, b);
            }
            let chi = build_chi(1, 3, 2, &map, &phi).unwrap();
            for y in &labels {
                let f = fidelity_direct(&chi, 1, 3, 2, y).unwrap();
                let gy = build_g_y(1, 3, 2, y).unwrap();
                assert!((f - gy.quad_form_f64(&beta)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn symmetric_1_to_2_fidelity_five_sixths() {
        let phi = ghz_phi(1, 2).unwrap();
        // beta uniform, normalized so beta^T G_0 beta = 1: G_0 = [[1,1/2],[1/2,1]]
        let g0 = build_g_y(1, 2, 2, &bs("00")).unwrap();
        assert_eq!(g0.entries[(0, 1)], rat(1, 2));
        let b = 1.0 / 3.0f64.sqrt();
        let mut map = BTreeMap::new();
        map.insert(bs("10"), b);
        map.insert(bs("01"), b);
        let chi = build_chi(1, 2, 2, &map, &phi).unwrap();
        assert!((chi.norm() - 1.0).abs() < 1e-12);
        let f = fidelity_direct(&chi, 1, 2, 2, &bs("10")).unwrap();
        assert!((f - 5.0 / 6.0).abs() < 1e-10);
        // chi = psi_y normalized: perfect fidelity on y's sites
        let psi = build_psi_x(1, 2, 2, &bs("10"), &phi).unwrap();
        let f = fidelity_direct(&psi, 1, 2, 2, &bs("10")).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eta_norms_are_one() {
        assert!((eta_norm_check(1, 2, 2, &bs("01"), &bs("10")).unwrap() - 1.0).abs() < 1e-10);
        assert!((eta_norm_check(2, 3, 2, &bs("011"), &bs("110")).unwrap() - 1.0).abs() < 1e-10);
        assert!((eta_norm_check(2, 4, 2, &bs("0011"), &bs("1100")).unwrap() - 1.0).abs() < 1e-10);
        assert!((eta_norm_check(2, 4, 2, &bs("1100"), &bs("1100")).unwrap() - 1.0).abs() < 1e-10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let phi = random_symmetric_state(2, 2, &mut rng).unwrap();
        let v = eta_norm_check_with(2, 4, 2, &bs("0110"), &bs("1010"), &phi).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn commutator_residuals_vanish() {
        for (m, w, d) in [(1usize, 1usize, 2usize), (1, 2, 2), (1, 1, 3), (2, 1, 2)] {
            let r = commutator_check(m, w, d).unwrap();
            assert!(r < 1e-10, "({m},{w},{d}) residual {r:.2e}");
        }
    }

    #[test]
    fn lieb_mattis_blocks_nonnegative() {
        let mut w = BTreeMap::new();
        w.insert(bs("10"), 0.5);
        w.insert(bs("01"), 0.5);
        let r = build_r(1, 2, 2, &w).unwrap();
        assert!(lieb_mattis_check(&r).unwrap());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let mut a: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = a.iter().sum();
            for v in a.iter_mut() {
                *v /= s;
            }
            let mut w = BTreeMap::new();
            for (lbl, &v) in ["100", "010", "001"].iter().zip(&a) {
                w.insert(bs(lbl), v);
            }
            let r = build_r(1, 3, 2, &w).unwrap();
            assert!(lieb_mattis_check(&r).unwrap());
        }
    }

    #[test]
    fn phi_trace_examples() {
        assert!(phi_trace_check(&ghz_phi(3, 2).unwrap(), 1).unwrap());
        // sqrt-3 state on 4 sites: |00>W + W|00> + |11>|11>, W = (|01>+|10>)/sqrt2
        let mut amp = vec![0.0f64; 16];
        let s = 1.0 / 2f64.sqrt();
        let w: [f64; 4] = [0.0, s, s, 0.0];
        let e00: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
        let e11: [f64; 4] = [0.0, 0.0, 0.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                amp[i * 4 + j] += (e00[i] * w[j] + w[i] * e00[j] + e11[i] * e11[j]) / 3f64.sqrt();
            }
        }
        let phi = DenseState::from_real(vec![2; 4], &amp).unwrap();
        assert!(phi_trace_check(&phi, 2).unwrap());

        let mut z = vec![0.0f64; 8];
        z[0] = 1.0;
        let zero_state = DenseState::from_real(vec![2; 3], &z).unwrap();
        assert!(!phi_trace_check(&zero_state, 1).unwrap());
    }

    #[test]
    fn r_x_transpose_recovers_projector() {
        // PT over IN of R_x equals the scaled embedded projector
        let x = bs("10");
        let r = r_x(1, 2, 2, &x).unwrap();
        let in_mask = bs("100");
        let back = partial_transpose(&r, &in_mask).unwrap();
        let p = sym_projector(2, 2).unwrap();
        let scale = 2.0 / 3.0;
        let e = embed_op(&p.scale(scale), &[0, 1], 3).unwrap();
        assert!(back.mat.max_abs_diff(&e.mat) < 1e-12);
    }

    #[test]
    fn max_eig_diag_and_errors() {
        let m = CplxMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new((i + 1) as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let op = DenseOperator::new(vec![3], m).unwrap();
        let (v, vec) = max_eig(&op).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!((vec.amp[2].re - 1.0).abs() < 1e-12);

        let mut bad = CplxMatrix::zeros(2, 2);
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        let op = DenseOperator::new(vec![2], bad).unwrap();
        assert!(matches!(max_eig(&op), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let err = checked_dim(20, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(err.to_string().contains("CLONETRADE_MAX_DIM"));
    }

    #[test]
    fn g0_spectrum_matches_dense_gram() {
        // numeric eigenvalues of the dense G_0 match the closed form
        let g = build_g_y(2, 4, 2, &bs("0000")).unwrap();
        let spectrum = g0_spectrum(2, 4, 2).unwrap();
        let expect: Vec<f64> = spectrum.expand().iter().map(|r| r.to_f64().unwrap()).collect();
        let (mut vals, _) = g.to_f64().sym_eigen();
        vals.reverse(); // descending like the closed form
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
