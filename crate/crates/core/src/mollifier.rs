//! The Bentkus product mollifier `G`, its scaled form `G_θ`, the orthant
//! indicator `ψ`, and the shift parameters `(Λ, α)`.

use crate::error::{Error, Result};
use crate::linalg::{eigvals_sym, SymMatrix};
use crate::normal::{g_derivs, gbar, log_g};

/// `ln G(x) = Σ ln g(xᵢ)`, summed in sorted order so the result is permutation invariant.
pub fn log_big_g(x: &[f64]) -> f64 {
    let mut terms: Vec<f64> = x.iter().map(|&v| log_g(v)).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// `G(x) = Πᵢ g(xᵢ)`
pub fn big_g(x: &[f64]) -> f64 {
    log_big_g(x).exp()
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("theta must be positive and finite, got {theta}")))
    }
}

/// `G_θ(x) = G(−x/θ) = Pr[x + θg ≤ 0]`
pub fn g_theta(x: &[f64], theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let scaled: Vec<f64> = x.iter().map(|&v| -v / theta).collect();
    Ok(big_g(&scaled))
}

/// `ψ(x) = [maxᵢ xᵢ ≤ 0]`
pub fn psi(x: &[f64]) -> bool {
    x.iter().all(|&v| v <= 0.0)
}

/// `Ψ_θ(M) = G_θ(λ(M))`
pub fn psi_theta(m: &SymMatrix<f64>, theta: f64) -> Result<f64> {
    g_theta(&eigvals_sym(m)?, theta)
}

/// `‖G^{(t)}(x)‖₁`: the sum over ordered index tuples of the absolute mixed partials of `G` at `x`.
///
/// Every partial is `G(x)` times a product of per-coordinate ratios
/// `g'/g = ḡ`, `g''/g = −xḡ`, `g'''/g = (x² − 1)ḡ`, so the sum collapses to
/// power sums of those ratios.
pub fn bentkus_norm1(x: &[f64], order: usize) -> Result<f64> {
    let big = big_g(x);
    let r1: Vec<f64> = x.iter().map(|&v| gbar(v)).collect();
    let p1: f64 = r1.iter().sum();
    match order {
        1 => Ok(big * p1),
        2 => {
            let p2: f64 = r1.iter().map(|b| b * b).sum();
            let diag: f64 = x.iter().zip(&r1).map(|(v, b)| v.abs() * b).sum();
            Ok(big * (p1 * p1 - p2 + diag))
        }
        3 => {
            let p2: f64 = r1.iter().map(|b| b * b).sum();
            let p3: f64 = r1.iter().map(|b| b * b * b).sum();
            let distinct = p1 * p1 * p1 - 3.0 * p1 * p2 + 2.0 * p3;
            // Σ_{i≠j} |xᵢ|ḡᵢ ḡⱼ
            let pair: f64 = x.iter().zip(&r1).map(|(v, b)| v.abs() * b * (p1 - b)).sum();
            let diag: f64 = x.iter().zip(&r1).map(|(v, b)| (v * v - 1.0).abs() * b).sum();
            Ok(big * (distinct + 3.0 * pair + diag))
        }
        _ => Err(Error::Input(format!("bentkus_norm1 supports orders 1..=3, got {order}"))),
    }
}

/// Smoothing scale `θ`, error `δ`, and the derived shift `α` and boundary width `Λ`.
///
/// `α = c_shift·θ·√ln(k/δ)` and `Λ = lambda_ratio·α`. With `Λ = α` the first
/// sandwich clause fails at `maxᵢ xᵢ = −Λ`, where the shifted point sits on the
/// orthant boundary; `lambda_ratio = 2` makes all three clauses hold for `c_shift ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierParams {
    pub k: usize,
    pub theta: f64,
    pub delta: f64,
    pub c_shift: f64,
    pub lambda_ratio: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl MollifierParams {
    pub const DEFAULT_C_SHIFT: f64 = 2.0;
    pub const DEFAULT_LAMBDA_RATIO: f64 = 2.0;

    pub fn new(k: usize, theta: f64, delta: f64) -> Result<Self> {
        Self::with_constants(k, theta, delta, Self::DEFAULT_C_SHIFT, Self::DEFAULT_LAMBDA_RATIO)
    }

    pub fn with_constants(k: usize, theta: f64, delta: f64, c_shift: f64, lambda_ratio: f64) -> Result<Self> {
        check_theta(theta)?;
        if k == 0 {
            return Err(Error::Input("k must be positive".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Input(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(c_shift > 0.0 && lambda_ratio >= 1.0) {
            return Err(Error::Input(format!(
                "need c_shift > 0 and lambda_ratio >= 1 (got {c_shift}, {lambda_ratio})"
            )));
        }
        let alpha = c_shift * theta * (k as f64 / delta).ln().max(0.0).sqrt();
        if alpha <= 0.0 {
            return Err(Error::Input("shift alpha vanishes; need k/delta > 1".into()));
        }
        Ok(Self { k, theta, delta, c_shift, lambda_ratio, alpha, lambda: lambda_ratio * alpha })
    }
}

/// Region of `x` relative to the boundary band `(−Λ, Λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Inner,
    Band,
    Outer,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    pub region: Region,
    /// Clause 1 (`maxᵢ xᵢ ≤ −Λ` ⇒ `|G_θ(x+α) − ψ(x)| ≤ δ`); vacuously true outside that region.
    pub inner_ok: bool,
    /// Clause 2 (`maxᵢ xᵢ ≥ Λ` ⇒ `|G_θ(x−α) − ψ(x)| ≤ δ`).
    pub outer_ok: bool,
    /// Clause 3 lower half: `G_θ(x+α) − δ ≤ ψ(x)`.
    pub lower_ok: bool,
    /// Clause 3 upper half: `ψ(x) ≤ G_θ(x−α) + δ`.
    pub upper_ok: bool,
}

impl SandwichReport {
    pub fn all_ok(&self) -> bool {
        self.inner_ok && self.outer_ok && self.lower_ok && self.upper_ok
    }
}

pub fn sandwich_check(params: &MollifierParams, x: &[f64]) -> Result<SandwichReport> {
    if x.len() != params.k {
        return Err(Error::Dimension { expected: params.k, got: x.len() });
    }
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let region = if max <= -params.lambda {
        Region::Inner
    } else if max >= params.lambda {
        Region::Outer
    } else {
        Region::Band
    };
    let plus: Vec<f64> = x.iter().map(|v| v + params.alpha).collect();
    let minus: Vec<f64> = x.iter().map(|v| v - params.alpha).collect();
    let lo = g_theta(&plus, params.theta)?;
    let hi = g_theta(&minus, params.theta)?;
    let p = if psi(x) { 1.0 } else { 0.0 };
    let d = params.delta;
    Ok(SandwichReport {
        region,
        inner_ok: region != Region::Inner || (lo - p).abs() <= d,
        outer_ok: region != Region::Outer || (hi - p).abs() <= d,
        lower_ok: lo - d <= p,
        upper_ok: p <= hi + d,
    })
}

/// `G` with each coordinate mapped through `u = −(x + shift)/θ`: the function
/// `x ↦ G_θ(x + shift)` as a symmetric function of `k` variables, with analytic partials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedBentkus {
    pub theta: f64,
    pub shift: f64,
}

impl ShiftedBentkus {
    pub fn new(theta: f64, shift: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self { theta, shift })
    }

    /// Per-coordinate factor `h(x) = g(u)` and its first three derivatives in `x`.
    pub fn factor(&self, x: f64) -> [f64; 4] {
        let u = -(x + self.shift) / self.theta;
        let (d1, d2, d3) = g_derivs(u);
        let s = -1.0 / self.theta;
        [crate::normal::g(u), d1 * s, d2 * s * s, d3 * s * s * s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::FRAC_1_SQRT_2PI;

    #[test]
    fn origin_values() {
        for k in 1..6 {
            assert!((big_g(&vec![0.0; k]) - 0.5f64.powi(k as i32)).abs() < 1e-15);
            assert!((g_theta(&vec![0.0; k], 0.3).unwrap() - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        assert!((big_g(&[0.7]) - crate::normal::g(0.7)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_theta() {
        assert!(g_theta(&[0.0], 0.0).is_err());
        assert!(g_theta(&[0.0], -1.0).is_err());
    }

    #[test]
    fn psi_cases() {
        assert!(psi(&[-1.0, -2.0]));
        assert!(!psi(&[-1.0, 0.1]));
        assert!(psi(&[0.0, 0.0]));
    }

    #[test]
    fn norm1_single_coordinate() {
        assert!((bentkus_norm1(&[0.0], 1).unwrap() - FRAC_1_SQRT_2PI).abs() < 1e-15);
        assert!(bentkus_norm1(&[0.0], 4).is_err());
    }

    #[test]
    fn params_derived_quantities() {
        let p = MollifierParams::new(8, 0.5, 0.01).unwrap();
        let expect = 2.0 * 0.5 * (800.0f64).ln().sqrt();
        assert!((p.alpha - expect).abs() < 1e-12);
        assert!((p.lambda - 2.0 * expect).abs() < 1e-12);
        assert!(MollifierParams::new(8, 0.5, 1.5).is_err());
    }

    #[test]
    fn factor_matches_g_theta() {
        let f = ShiftedBentkus::new(0.4, 0.3).unwrap();
        let x = [0.1, -0.7, 0.25];
        let prod: f64 = x.iter().map(|&v| f.factor(v)[0]).product();
        let shifted: Vec<f64> = x.iter().map(|v| v + 0.3).collect();
        assert!((prod - g_theta(&shifted, 0.4).unwrap()).abs() < 1e-15);
    }
}
