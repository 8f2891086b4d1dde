use super::{Mat, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = V·diag(λ)·Vᵀ` with `λ` sorted non-increasing.
#[derive(Clone, Debug)]
pub struct EigDecomposition<T> {
    pub eigenvalues: Vec<T>,
    /// Orthogonal matrix whose columns are the eigenvectors.
    pub eigenvectors: Mat<T>,
}

impl<T: Scalar> EigDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(f(λ))·Vᵀ`
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> SymMatrix<T> {
        let vals: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymMatrix::diag(&vals).congruence(&self.eigenvectors)
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        self.map_spectrum(|l| l)
    }
}

fn convergence_tol<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// Cyclic Jacobi sweeps on a working copy. Returns the diagonalized matrix and,
/// if requested, the accumulated rotations.
fn jacobi<T: Scalar>(m: &SymMatrix<T>, want_vectors: bool) -> Result<(Vec<T>, Option<Mat<T>>)> {
    if !m.is_finite() {
        return Err(Error::Input("non-finite entry in eigensolver input".into()));
    }
    let n = m.dim();
    let mut a = m.to_mat();
    let mut v = want_vectors.then(|| Mat::identity(n));
    let tol = convergence_tol::<T>() * m.frobenius();

    let off_norm = |a: &Mat<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off.to_f64_lossy() });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
                    T::lit(0.5) / theta
                } else {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        off = off_norm(&a);
    }
    Ok(((0..n).map(|i| a[(i, i)]).collect(), v))
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `1e-12·‖M‖_F` (or a few ulps for `f32`); gives up after
/// [`JACOBI_MAX_SWEEPS`] sweeps. Eigenvalues are sorted non-increasing and
/// each eigenvector is signed so that its largest-magnitude entry is positive.
pub fn eig_sym<T: Scalar>(m: &SymMatrix<T>) -> Result<EigDecomposition<T>> {
    let (vals, v) = jacobi(m, true)?;
    let v = v.expect("vectors requested");
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).expect("finite eigenvalues").then(i.cmp(&j)));

    let mut vecs = Mat::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut pivot = T::zero();
        for k in 0..n {
            if v[(k, src)].abs() > pivot.abs() {
                pivot = v[(k, src)];
            }
        }
        let sign = if pivot < T::zero() { -T::one() } else { T::one() };
        for k in 0..n {
            vecs[(k, dst)] = sign * v[(k, src)];
        }
    }
    Ok(EigDecomposition { eigenvalues: order.iter().map(|&i| vals[i]).collect(), eigenvectors: vecs })
}

/// Eigenvalues only, sorted non-increasing.
pub fn eigvals_sym<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    let (mut vals, _) = jacobi(m, false)?;
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(vals)
}

pub fn lambda_max<T: Scalar>(m: &SymMatrix<T>) -> Result<T> {
    Ok(eigvals_sym(m)?[0])
}

pub fn lambda_min<T: Scalar>(m: &SymMatrix<T>) -> Result<T> {
    Ok(*eigvals_sym(m)?.last().expect("non-empty spectrum"))
}
