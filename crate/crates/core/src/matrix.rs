//! Dense row-major matrices over any [`Scalar`], with exact Gauss–Jordan
//! elimination for rational types and conversion helpers at the float
//! boundary.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Matrix { nrows, ncols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() * s.clone()
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimension mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)].clone();
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.ncols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    /// Sesquilinear form `x† A x` (plain quadratic form for real scalars).
    pub fn quad_form(&self, x: &[T]) -> T {
        assert_eq!(self.nrows, self.ncols);
        assert_eq!(self.nrows, x.len());
        let ax = self.mul_vec(x);
        let mut acc = T::zero();
        for (xi, axi) in x.iter().zip(ax) {
            acc = acc + xi.conj() * axi;
        }
        acc
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.nrows, self.ncols);
        let mut acc = T::zero();
        for i in 0..self.nrows {
            acc = acc + self[(i, i)].clone();
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix::from_fn(self.nrows, self.ncols, |i, j| f(&self[(i, j)]))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::approx_f64)
    }

    /// Reduced row-echelon form; returns (rref, pivot columns, rank).
    /// Exact for exact scalars; partial pivoting by magnitude for floats.
    pub fn rref(&self) -> (Self, Vec<usize>, usize) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.ncols {
            if r == a.nrows {
                break;
            }
            let mut best = None;
            let mut best_mag = if T::EXACT {
                0.0
            } else {
                1e-12 * a.max_abs().max(1.0)
            };
            for i in r..a.nrows {
                let mag = a[(i, c)].abs_f64();
                if (T::EXACT && a[(i, c)] != T::zero() && best.is_none())
                    || (!T::EXACT && mag > best_mag)
                {
                    best = Some(i);
                    best_mag = mag;
                }
            }
            let Some(p) = best else { continue };
            a.swap_rows(r, p);
            let inv = T::one() / a[(r, c)].clone();
            for j in c..a.ncols {
                a[(r, j)] = a[(r, j)].clone() * inv.clone();
            }
            for i in 0..a.nrows {
                if i == r || a[(i, c)] == T::zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..a.ncols {
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots, r)
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (rr, pivots, _) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for free in 0..self.ncols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![T::zero(); self.ncols];
            v[free] = T::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rr[(i, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Inverse via Gauss–Jordan; `None` when singular. Exact for exact scalars.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let (rr, pivots, rank) = aug.rref();
        if rank < n || pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| rr[(i, n + j)].clone()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)])
    }

    /// Eigenvalues and eigenvectors of a real symmetric matrix, ascending.
    /// Columns of the returned matrix are the eigenvectors.
    pub fn sym_eigen(&self) -> (Vec<f64>, Matrix<f64>) {
        assert_eq!(self.nrows, self.ncols);
        let eig = self.to_nalgebra().symmetric_eigen();
        let n = self.nrows;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.to_nalgebra().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }
}

impl Matrix<Complex64> {
    pub fn to_nalgebra_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)])
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Matrix<Complex64>) {
        assert_eq!(self.nrows, self.ncols);
        let eig = self.to_nalgebra_complex().symmetric_eigen();
        let n = self.nrows;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn re(&self) -> Matrix<f64> {
        self.map(|z| z.re)
    }

    pub fn max_imag(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|i| (0..self.ncols).map(move |j| (i, j)))
            .map(|ij| self[ij].im.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn exact_inverse_roundtrip() {
        let a = Matrix::from_rows(vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv[(0, 0)], rat(4, 3));
        assert_eq!(inv[(0, 1)], rat(-2, 3));
        assert_eq!(a.matmul(&inv), Matrix::identity(2));
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let a = Matrix::from_rows(vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
        ]);
        let basis = a.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in basis {
            let img = a.mul_vec(&v);
            assert!(img.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn sym_eigen_ascending() {
        let a = Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let (vals, vecs) = a.sym_eigen();
        assert!((vals[0] - 0.5).abs() < 1e-12);
        assert!((vals[1] - 1.5).abs() < 1e-12);
        // eigenvector of the top eigenvalue is uniform up to sign
        assert!((vecs[(0, 1)].abs() - vecs[(1, 1)].abs()).abs() < 1e-12);
    }

    #[test]
    fn quad_form_rational() {
        let a = Matrix::from_rows(vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]]);
        let v = vec![Rat::one(), Rat::one()];
        assert_eq!(a.quad_form(&v), rat(3, 1));
    }
}
