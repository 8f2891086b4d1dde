//! Gauss–Legendre quadrature and the integral representations of the first
//! derivative of `exp` and the second derivative of `e^{−x²/2}`.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, EigDecomposition, Mat, SymMatrix};

pub const SINGLE_POINTS: usize = 64;
pub const DOUBLE_POINTS: usize = 48;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on Pₙ.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pm) = (p1, p0);
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn exp_of(e: &EigDecomposition<f64>, c: f64) -> Mat<f64> {
    e.map_spectrum(|l| (c * l).exp()).to_mat()
}

fn exp_sq_of(e: &EigDecomposition<f64>, s: f64) -> Mat<f64> {
    e.map_spectrum(|l| (-0.5 * s * l * l).exp()).to_mat()
}

fn check_points(n: usize) -> Result<()> {
    if n < 16 {
        return Err(Error::Input(format!("quadrature needs at least 16 points, got {n}")));
    }
    Ok(())
}

/// `∫₀¹ e^{(1−u)X} A e^{uX} du` by `quad_points`-point Gauss–Legendre.
pub fn dyson_d1_exp(x: &SymMatrix<f64>, a: &SymMatrix<f64>, quad_points: usize) -> Result<SymMatrix<f64>> {
    check_points(quad_points)?;
    if a.dim() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), got: a.dim() });
    }
    let e = eig_sym(x)?;
    let am = a.to_mat();
    let (nodes, weights) = gauss_legendre(quad_points);
    let mut acc = Mat::zeros(x.dim());
    for (&u, &w) in nodes.iter().zip(&weights) {
        let term = exp_of(&e, 1.0 - u).matmul(&am).matmul(&exp_of(&e, u));
        acc.axpy(w, &term);
    }
    Ok(acc.symmetric_part())
}

/// Second derivative of `f(x) = e^{−x²/2}` at `X` in directions `(A, B)` from its
/// integral form: two double integrals over `(u, v)` involving `XA + AX` and
/// `XB + BX`, minus half the single integral of `e^{−(1−u)X²/2}(AB + BA)e^{−uX²/2}`.
pub fn d2_gauss_integral(
    x: &SymMatrix<f64>,
    a: &SymMatrix<f64>,
    b: &SymMatrix<f64>,
    quad_points: usize,
) -> Result<SymMatrix<f64>> {
    check_points(quad_points)?;
    for m in [a, b] {
        if m.dim() != x.dim() {
            return Err(Error::Dimension { expected: x.dim(), got: m.dim() });
        }
    }
    let k = x.dim();
    let e = eig_sym(x)?;
    let (xm, am, bm) = (x.to_mat(), a.to_mat(), b.to_mat());
    let xa = xm.matmul(&am).add(&am.matmul(&xm));
    let xb = xm.matmul(&bm).add(&bm.matmul(&xm));
    let ab = am.matmul(&bm).add(&bm.matmul(&am));
    let (nodes, weights) = gauss_legendre(quad_points);
    let mut acc = Mat::zeros(k);
    for (&u, &wu) in nodes.iter().zip(&weights) {
        let single = exp_sq_of(&e, 1.0 - u).matmul(&ab).matmul(&exp_sq_of(&e, u));
        acc.axpy(-0.5 * wu, &single);
        for (&v, &wv) in nodes.iter().zip(&weights) {
            let first = exp_sq_of(&e, (1.0 - u) * (1.0 - v))
                .matmul(&xb)
                .matmul(&exp_sq_of(&e, (1.0 - u) * v))
                .matmul(&xa)
                .matmul(&exp_sq_of(&e, u));
            acc.axpy(0.25 * wu * wv * (1.0 - u), &first);
            let second = exp_sq_of(&e, 1.0 - u)
                .matmul(&xa)
                .matmul(&exp_sq_of(&e, u * (1.0 - v)))
                .matmul(&xb)
                .matmul(&exp_sq_of(&e, u * v));
            acc.axpy(0.25 * wu * wv * u, &second);
        }
    }
    Ok(acc.symmetric_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        for n in [1, 2, 5, 16, 48, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14, "n={n}");
            for p in 0..(2 * n).min(40) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p + 1) as f64).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn dyson_identity_direction() {
        let x = SymMatrix::from_rows(&[vec![0.4, 0.2], vec![0.2, -0.3]]).unwrap();
        let d = dyson_d1_exp(&x, &SymMatrix::identity(2), 64).unwrap();
        let ex = eig_sym(&x).unwrap().map_spectrum(f64::exp);
        assert!(d.sub(&ex).max_abs() < 1e-14);
    }

    #[test]
    fn dyson_at_zero() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let d = dyson_d1_exp(&SymMatrix::zeros(2), &a, 16).unwrap();
        assert!(d.sub(&a).max_abs() < 1e-14);
    }

    #[test]
    fn gauss_integral_at_zero() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let b = SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.5]]).unwrap();
        let d = d2_gauss_integral(&SymMatrix::zeros(2), &a, &b, 16).unwrap();
        let expect = a.matmul(&b).add(&b.matmul(&a)).scale(-0.5).symmetric_part();
        assert!(d.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn too_few_points() {
        assert!(dyson_d1_exp(&SymMatrix::zeros(2), &SymMatrix::zeros(2), 8).is_err());
    }
}
