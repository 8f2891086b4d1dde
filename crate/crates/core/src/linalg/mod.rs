//! Dense square matrices: a general [`Mat`] for intermediate products and the
//! symmetric [`SymMatrix`] that every spectral computation starts from.

mod eig;

pub use eig::{eig_sym, eigvals_sym, lambda_max, lambda_min, EigDecomposition, JACOBI_MAX_SWEEPS};

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest asymmetry tolerated when loading a matrix that should be symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// General dense `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == T::zero() {
                    continue;
                }
                let row = &rhs.data[l * n..(l + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Mat { n: self.n, data }
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Mat { n: self.n, data }
    }

    pub fn scale(&self, c: T) -> Mat<T> {
        Mat { n: self.n, data: self.data.iter().map(|&a| a * c).collect() }
    }

    /// `self += c · rhs`
    pub fn axpy(&mut self, c: T, rhs: &Mat<T>) {
        for (d, &b) in self.data.iter_mut().zip(&rhs.data) {
            *d += c * b;
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Symmetric part `(M + Mᵀ)/2`, with no tolerance check.
    pub fn symmetric_part(&self) -> SymMatrix<T> {
        let n = self.n;
        let half = T::lit(0.5);
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = half * (self[(i, j)] + self[(j, i)]);
            }
        }
        SymMatrix { n, data }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Dense `k × k` real symmetric matrix.
///
/// Entries are stored in full (row-major) and are exactly symmetric: every
/// constructor either symmetrizes or preserves symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, T::one())
    }

    pub fn scaled_identity(n: usize, c: T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds from row-major entries, replacing `M` by `(M + Mᵀ)/2`.
    ///
    /// Rejects non-finite entries and asymmetry above [`SYMMETRY_TOL`].
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite matrix entry".into()));
        }
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((data[i * n + j] - data[j * n + i]).abs());
            }
        }
        if worst.to_f64_lossy() > SYMMETRY_TOL {
            return Err(Error::Asymmetric(worst.to_f64_lossy()));
        }
        Ok(Mat { n, data }.symmetric_part())
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    /// Wraps row-major data that is symmetric by construction.
    pub(crate) fn from_raw(n: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn to_mat(&self) -> Mat<T> {
        Mat { n: self.n, data: self.data.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "add dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "sub dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, c: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&a| a * c).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    /// `self += c · rhs`
    pub fn axpy(&mut self, c: T, rhs: &Self) {
        debug_assert_eq!(self.n, rhs.n);
        for (d, &b) in self.data.iter_mut().zip(&rhs.data) {
            *d += c * b;
        }
    }

    /// `self + c·I`
    pub fn shift(&self, c: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += c;
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Mat<T> {
        self.to_mat().matmul(&rhs.to_mat())
    }

    /// `M²`, symmetric by construction.
    pub fn square(&self) -> Self {
        self.matmul(self).symmetric_part()
    }

    /// `VᵀMV` for an orthogonal (or arbitrary) `V`.
    pub fn congruence_t(&self, v: &Mat<T>) -> Self {
        v.transpose().matmul(&self.to_mat()).matmul(v).symmetric_part()
    }

    /// `VMVᵀ`.
    pub fn congruence(&self, v: &Mat<T>) -> Self {
        v.matmul(&self.to_mat()).matmul(&v.transpose()).symmetric_part()
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.n, b.n);
        let n = na + nb;
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                out.data[i * n + j] = a.get(i, j);
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                out.data[(na + i) * n + na + j] = b.get(i, j);
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Spectral norm `max |λᵢ|`.
    pub fn spectral_norm(&self) -> Result<T> {
        let ev = eigvals_sym(self)?;
        Ok(ev.iter().fold(T::zero(), |m, &v| m.max(v.abs())))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_small_asymmetry() {
        let m = SymMatrix::<f64>::from_row_major(2, vec![1.0, 2.0, 2.0 + 1e-10, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!((m.get(0, 1) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_large_asymmetry_and_nan() {
        assert!(matches!(SymMatrix::from_row_major(2, vec![1.0, 2.0, 2.1, 3.0]), Err(Error::Asymmetric(_))));
        assert!(SymMatrix::from_row_major(1, vec![f64::NAN]).is_err());
        assert!(SymMatrix::<f64>::from_row_major(2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn block_diag_layout() {
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let b = SymMatrix::diag(&[3.0]);
        let c = SymMatrix::block_diag(&a, &b);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.get(2, 2), 3.0);
        assert_eq!(c.get(0, 2), 0.0);
    }

    #[test]
    fn f32_works_too() {
        let m = SymMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let sq = m.square();
        assert_eq!(sq.get(0, 0), 5.0);
        assert_eq!(sq.get(0, 1), 4.0);
    }
}
