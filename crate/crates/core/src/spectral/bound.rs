//! Comparison of `|D³Ψ_θ(X + αI)[H, H, H]|` with `(Δ² + α²)/θ³ · ln³k · ‖H‖³`.

use super::fd::fd_spectral_oracle;
use super::functions::ProductFunction;
use super::sendov::{frechet_d3_spectral, D3Options};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::mollifier::psi_theta;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeReport {
    pub analytic_value: f64,
    pub fd_value: f64,
    /// `|analytic − fd| / max(1, |fd|)`
    pub rel_error: f64,
    pub bound_value: f64,
    /// `|analytic| / bound`
    pub ratio: f64,
}

impl DerivativeReport {
    pub fn new(analytic_value: f64, fd_value: f64, bound_value: f64) -> Self {
        let rel_error = (analytic_value - fd_value).abs() / fd_value.abs().max(1.0);
        let ratio = if analytic_value == 0.0 { 0.0 } else { analytic_value.abs() / bound_value };
        Self { analytic_value, fd_value, rel_error, bound_value, ratio }
    }
}

/// Evaluates the third derivative of `Ψ_θ` at `X + αI` in direction `H`
/// through the seven-term formula (jittering clustered spectra), checks it
/// against the third-order finite-difference oracle, and compares it with the
/// bound shape using `Δ = max(1, ‖X‖)` and constant 1.
pub fn bentkus_d3_bound_check(
    x: &SymMatrix<f64>,
    h: &SymMatrix<f64>,
    theta: f64,
    alpha: f64,
) -> Result<DerivativeReport> {
    if h.dim() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), got: h.dim() });
    }
    let k = x.dim();
    let f = ProductFunction::bentkus_theta(theta, 0.0)?;
    let shifted = x.shift(alpha);
    let analytic = frechet_d3_spectral(&f, &shifted, h, D3Options { jitter: true, ..D3Options::default() })?;
    let fd = if h.max_abs() == 0.0 {
        0.0
    } else {
        fd_spectral_oracle(&|m| psi_theta(m, theta), &shifted, h, 3, None)?.value
    };
    let delta = x.spectral_norm()?.max(1.0);
    let lnk = (k as f64).ln();
    let hn = h.spectral_norm()?;
    let bound = (delta * delta + alpha * alpha) / theta.powi(3) * lnk.powi(3) * hn.powi(3);
    Ok(DerivativeReport::new(analytic, fd, bound))
}
