//! Finite-difference oracles for directional derivatives of matrix-argument maps.

use crate::error::Result;
use crate::linalg::SymMatrix;

/// Central-difference estimate after one Richardson step, with the size of
/// that step as a truncation-error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

/// Default step: `5e-3·(1+‖X‖)/‖H‖` for order 3, `1e-3·(1+‖X‖)/‖H‖` otherwise.
pub fn default_step(x: &SymMatrix<f64>, h: &SymMatrix<f64>, order: usize) -> Result<f64> {
    let hn = h.spectral_norm()?;
    let base = if order >= 3 { 5e-3 } else { 1e-3 };
    Ok(if hn > 0.0 { base * (1.0 + x.spectral_norm()?) / hn } else { base })
}

fn stencil(phi: &dyn Fn(f64) -> Result<f64>, order: usize, h: f64) -> Result<f64> {
    Ok(match order {
        1 => (phi(h)? - phi(-h)?) / (2.0 * h),
        2 => (phi(h)? - 2.0 * phi(0.0)? + phi(-h)?) / (h * h),
        _ => (-0.5 * phi(-2.0 * h)? + phi(-h)? - phi(h)? + 0.5 * phi(2.0 * h)?) / (h * h * h),
    })
}

/// `dᵒ/dtᵒ F(X + tH)` at `t = 0` for `o ∈ {1, 2, 3}`.
///
/// All three stencils have `O(h²)` truncation error, so one Richardson step
/// combines steps `h` and `h/2` as `(4·D(h/2) − D(h))/3`.
pub fn fd_spectral_oracle(
    f: &dyn Fn(&SymMatrix<f64>) -> Result<f64>,
    x: &SymMatrix<f64>,
    h_dir: &SymMatrix<f64>,
    order: usize,
    step: Option<f64>,
) -> Result<FdEstimate> {
    if !(1..=3).contains(&order) {
        return Err(crate::Error::Input(format!("finite-difference order must be 1, 2 or 3, got {order}")));
    }
    let h = match step {
        Some(h) => h,
        None => default_step(x, h_dir, order)?,
    };
    let phi = |t: f64| -> Result<f64> {
        let mut m = x.clone();
        m.axpy(t, h_dir);
        f(&m)
    };
    let coarse = stencil(&phi, order, h)?;
    let fine = stencil(&phi, order, 0.5 * h)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(FdEstimate { value, error_estimate: (value - fine).abs() })
}

/// `d/dt M(X + tA)` at `t = 0` by the fourth-order five-point stencil.
pub fn fd_matrix_d1(
    f: &dyn Fn(&SymMatrix<f64>) -> Result<SymMatrix<f64>>,
    x: &SymMatrix<f64>,
    a: &SymMatrix<f64>,
    h: f64,
) -> Result<SymMatrix<f64>> {
    let at = |t: f64| -> Result<SymMatrix<f64>> {
        let mut m = x.clone();
        m.axpy(t, a);
        f(&m)
    };
    let mut acc = at(-2.0 * h)?;
    acc.axpy(-8.0, &at(-h)?);
    acc.axpy(8.0, &at(h)?);
    acc.axpy(-1.0, &at(2.0 * h)?);
    Ok(acc.scale(1.0 / (12.0 * h)))
}

/// `∂²/∂s∂t M(X + sA + tB)` at the origin by the four-point mixed stencil with one Richardson step.
pub fn fd_matrix_d2(
    f: &dyn Fn(&SymMatrix<f64>) -> Result<SymMatrix<f64>>,
    x: &SymMatrix<f64>,
    a: &SymMatrix<f64>,
    b: &SymMatrix<f64>,
    h: f64,
) -> Result<SymMatrix<f64>> {
    let at = |s: f64, t: f64| -> Result<SymMatrix<f64>> {
        let mut m = x.clone();
        m.axpy(s, a);
        m.axpy(t, b);
        f(&m)
    };
    let mixed = |h: f64| -> Result<SymMatrix<f64>> {
        let mut acc = at(h, h)?;
        acc.axpy(-1.0, &at(h, -h)?);
        acc.axpy(-1.0, &at(-h, h)?);
        acc.axpy(1.0, &at(-h, -h)?);
        Ok(acc.scale(1.0 / (4.0 * h * h)))
    };
    let coarse = mixed(h)?;
    let fine = mixed(0.5 * h)?;
    Ok(fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvals_sym;

    #[test]
    fn trace_first_order() {
        let x = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, -2.0]]).unwrap();
        let h = SymMatrix::from_rows(&[vec![0.3, 0.1], vec![0.1, 0.9]]).unwrap();
        let est = fd_spectral_oracle(&|m| Ok(m.trace()), &x, &h, 1, None).unwrap();
        assert!((est.value - 1.2).abs() < 1e-10);
    }

    #[test]
    fn sum_of_squares_first_order() {
        let x = SymMatrix::diag(&[1.5, -0.5, 2.0]);
        let f = |m: &SymMatrix<f64>| Ok(eigvals_sym(m)?.iter().map(|v| v * v).sum::<f64>());
        let est = fd_spectral_oracle(&f, &x, &SymMatrix::identity(3), 1, None).unwrap();
        assert!((est.value - 2.0 * x.trace()).abs() < 1e-9);
    }

    #[test]
    fn cubic_third_order() {
        // tr((X + tH)³) has third t-derivative 6·tr(H³).
        let x = SymMatrix::from_rows(&[vec![0.2, 0.5], vec![0.5, -0.4]]).unwrap();
        let h = SymMatrix::from_rows(&[vec![1.0, -0.3], vec![-0.3, 0.6]]).unwrap();
        let f = |m: &SymMatrix<f64>| Ok(m.to_mat().matmul(&m.to_mat()).matmul(&m.to_mat()).trace());
        let est = fd_spectral_oracle(&f, &x, &h, 3, None).unwrap();
        let h3 = h.to_mat().matmul(&h.to_mat()).matmul(&h.to_mat()).trace();
        assert!((est.value - 6.0 * h3).abs() < 1e-7);
    }

    #[test]
    fn bad_order() {
        let x = SymMatrix::<f64>::identity(2);
        assert!(fd_spectral_oracle(&|m| Ok(m.trace()), &x, &x, 4, None).is_err());
    }
}
