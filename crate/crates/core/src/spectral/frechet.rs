//! First and second Fréchet derivatives of matrix functions `X ↦ f(X)` and of
//! spectral functions `X ↦ f(λ(X))`, via divided differences in the eigenbasis.

use super::divided::divided_diff;
use super::functions::{MultivariateSymmetricFunction, Partials, ScalarFunction};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, EigDecomposition, Mat, SymMatrix};

fn check_dims(x: &SymMatrix<f64>, others: &[&SymMatrix<f64>]) -> Result<()> {
    for m in others {
        if m.dim() != x.dim() {
            return Err(Error::Dimension { expected: x.dim(), got: m.dim() });
        }
    }
    Ok(())
}

/// `f^{[1]}(xᵢ, xⱼ)` for all pairs.
pub fn dd1_table(f: &ScalarFunction, x: &[f64]) -> Result<Vec<f64>> {
    let k = x.len();
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = divided_diff(f, &[x[i], x[j]])?;
            t[i * k + j] = v;
            t[j * k + i] = v;
        }
    }
    Ok(t)
}

/// `f^{[2]}(xᵢ, xⱼ, xₗ)` for all triples.
pub fn dd2_table(f: &ScalarFunction, x: &[f64]) -> Result<Vec<f64>> {
    let k = x.len();
    let mut t = vec![0.0; k * k * k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                t[(i * k + j) * k + l] = divided_diff(f, &[x[i], x[j], x[l]])?;
            }
        }
    }
    Ok(t)
}

/// `Df(X)[A] = V (f^{[1]}(xᵢ, xⱼ) A'ᵢⱼ) Vᵀ` with `A' = VᵀAV`.
pub fn frechet_d1(f: &ScalarFunction, x: &SymMatrix<f64>, a: &SymMatrix<f64>) -> Result<SymMatrix<f64>> {
    check_dims(x, &[a])?;
    let e = eig_sym(x)?;
    frechet_d1_with(f, &e, a)
}

pub fn frechet_d1_with(f: &ScalarFunction, e: &EigDecomposition<f64>, a: &SymMatrix<f64>) -> Result<SymMatrix<f64>> {
    let k = e.dim();
    let ap = a.congruence_t(&e.eigenvectors);
    let t = dd1_table(f, &e.eigenvalues)?;
    let mut m = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = t[i * k + j] * ap[(i, j)];
        }
    }
    Ok(m.symmetric_part().congruence(&e.eigenvectors))
}

/// `D²f(X)[A, B] = V (Σⱼ f^{[2]}(xᵢ, xⱼ, xₗ)(A'ᵢⱼB'ⱼₗ + B'ᵢⱼA'ⱼₗ)) Vᵀ`.
///
/// Both orderings of the two directions appear; with a single ordering the
/// result is not symmetric in `(A, B)` and misses half of the derivative
/// (for `f = x²` it would give `AB` instead of `AB + BA`).
pub fn frechet_d2(
    f: &ScalarFunction,
    x: &SymMatrix<f64>,
    a: &SymMatrix<f64>,
    b: &SymMatrix<f64>,
) -> Result<SymMatrix<f64>> {
    check_dims(x, &[a, b])?;
    let e = eig_sym(x)?;
    let k = e.dim();
    let ap = a.congruence_t(&e.eigenvectors);
    let bp = b.congruence_t(&e.eigenvectors);
    let t = dd2_table(f, &e.eigenvalues)?;
    let mut m = Mat::zeros(k);
    for i in 0..k {
        for l in 0..k {
            let mut s = 0.0;
            for j in 0..k {
                s += t[(i * k + j) * k + l] * (ap[(i, j)] * bp[(j, l)] + bp[(i, j)] * ap[(j, l)]);
            }
            m[(i, l)] = s;
        }
    }
    Ok(m.symmetric_part().congruence(&e.eigenvectors))
}

/// Relative gap below which two eigenvalues are merged in first-order quotients.
const MERGE_TOL: f64 = 1e-7;

fn spectral_scale(x: &[f64]) -> f64 {
    x.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// `(∇ᵢ − ∇ⱼ)/(xᵢ − xⱼ)`, replaced by `∇²ᵢᵢ − ∇²ᵢⱼ` for (near-)equal eigenvalues.
fn grad_quotient(p: &Partials, x: &[f64], i: usize, j: usize, scale: f64) -> f64 {
    let d = x[i] - x[j];
    if d.abs() < MERGE_TOL * scale {
        p.d2(i, i) - p.d2(i, j)
    } else {
        (p.d1(i) - p.d1(j)) / d
    }
}

/// `DF(X)[H] = Σᵢ ∇ᵢf(λ) Qᵢᵢ` with `Q = VᵀHV`.
pub fn spectral_d1(f: &dyn MultivariateSymmetricFunction, x: &SymMatrix<f64>, h: &SymMatrix<f64>) -> Result<f64> {
    check_dims(x, &[h])?;
    let e = eig_sym(x)?;
    let q = h.congruence_t(&e.eigenvectors);
    let p = f.partials(&e.eigenvalues, 1);
    Ok((0..e.dim()).map(|i| p.d1(i) * q[(i, i)]).sum())
}

/// `D²F(X)[H₁, H₂] = Σᵢⱼ ∇²ᵢⱼ Q₁ᵢᵢ Q₂ⱼⱼ + Σ_{i≠j} (∇ᵢ − ∇ⱼ)/(xᵢ − xⱼ) Q₁ᵢⱼ Q₂ᵢⱼ`.
pub fn spectral_d2(
    f: &dyn MultivariateSymmetricFunction,
    x: &SymMatrix<f64>,
    h1: &SymMatrix<f64>,
    h2: &SymMatrix<f64>,
) -> Result<f64> {
    check_dims(x, &[h1, h2])?;
    let e = eig_sym(x)?;
    let k = e.dim();
    let q1 = h1.congruence_t(&e.eigenvectors);
    let q2 = h2.congruence_t(&e.eigenvectors);
    let lam = &e.eigenvalues;
    let p = f.partials(lam, 2);
    let scale = spectral_scale(lam);
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            s += p.d2(i, j) * q1[(i, i)] * q2[(j, j)];
            if i != j {
                s += grad_quotient(&p, lam, i, j, scale) * q1[(i, j)] * q2[(i, j)];
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_diagonal_case() {
        let x = SymMatrix::diag(&[0.0, 1.0]);
        let a = SymMatrix::identity(2);
        let d = frechet_d1(&ScalarFunction::Exp, &x, &a).unwrap();
        assert!((d.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((d.get(1, 1) - 1f64.exp()).abs() < 1e-15);
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn square_second_derivative() {
        let x = SymMatrix::from_rows(&[vec![1.0, 0.3, -0.2], vec![0.3, -0.5, 0.1], vec![-0.2, 0.1, 2.0]]).unwrap();
        let a = SymMatrix::from_rows(&[vec![0.2, 1.0, 0.0], vec![1.0, 0.0, -0.4], vec![0.0, -0.4, 1.5]]).unwrap();
        let b = SymMatrix::from_rows(&[vec![-1.0, 0.5, 0.7], vec![0.5, 0.3, 0.0], vec![0.7, 0.0, 0.2]]).unwrap();
        let sq = ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]);
        let d2 = frechet_d2(&sq, &x, &a, &b).unwrap();
        let expect = a.matmul(&b).add(&b.matmul(&a)).symmetric_part();
        assert!(d2.sub(&expect).max_abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch() {
        let x = SymMatrix::<f64>::identity(2);
        assert!(frechet_d1(&ScalarFunction::Exp, &x, &SymMatrix::identity(3)).is_err());
    }
}
