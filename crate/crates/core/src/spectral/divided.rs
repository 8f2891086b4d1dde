//! Divided differences with confluent limits.

use super::functions::ScalarFunction;
use crate::error::{Error, Result};

/// Points closer than this (relative to `max(1, maxᵢ|xᵢ|)`) are treated as coincident.
pub const CONFLUENT_TOL: f64 = 1e-7;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

fn dd_sorted(f: &ScalarFunction, xs: &[f64], scale: f64) -> Result<f64> {
    let n = xs.len() - 1;
    if n == 0 {
        return Ok(f.value(xs[0]));
    }
    let spread = xs[n] - xs[0];
    if spread < CONFLUENT_TOL * scale {
        let mid = 0.5 * (xs[0] + xs[n]);
        return Ok(f.deriv(n, mid)? / factorial(n));
    }
    Ok((dd_sorted(f, &xs[1..], scale)? - dd_sorted(f, &xs[..n], scale)?) / spread)
}

/// `f^{[n]}(x₀, …, xₙ)` with `n = xs.len() − 1 ≤ 3`.
///
/// The points are sorted first; any subset that has collapsed to within
/// [`CONFLUENT_TOL`] is replaced by the derivative `f^{(m)}/m!`.
pub fn divided_diff(f: &ScalarFunction, xs: &[f64]) -> Result<f64> {
    if xs.is_empty() || xs.len() > 4 {
        return Err(Error::Input(format!("divided differences need 1 to 4 points, got {}", xs.len())));
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite divided-difference node".into()));
    }
    let mut pts = xs.to_vec();
    pts.sort_by(f64::total_cmp);
    let scale = pts.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    dd_sorted(f, &pts, scale)
}

/// Divided difference `y[i₀, …, iₙ]` of tabulated data `(xᵢ, yᵢ)` (distinct nodes).
pub fn divided_diff_data(x: &[f64], y: &[f64], idx: &[usize]) -> f64 {
    match idx.len() {
        1 => y[idx[0]],
        n => {
            let first = idx[0];
            let last = idx[n - 1];
            (divided_diff_data(x, y, &idx[1..]) - divided_diff_data(x, y, &idx[..n - 1])) / (x[last] - x[first])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_identities() {
        let sq = ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]);
        assert!((divided_diff(&sq, &[1.0, 3.0]).unwrap() - 4.0).abs() < 1e-15);
        let cube = ScalarFunction::Polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        assert!((divided_diff(&cube, &[1.0, 2.0, 4.0]).unwrap() - 7.0).abs() < 1e-14);
        assert!((divided_diff(&cube, &[4.0, 1.0, 2.0, -3.0]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn confluent_limits() {
        let e = ScalarFunction::Exp;
        assert_eq!(divided_diff(&e, &[0.0, 0.0]).unwrap(), 1.0);
        assert!((divided_diff(&e, &[0.5, 0.5, 0.5]).unwrap() - 0.5f64.exp() / 2.0).abs() < 1e-15);
        let mixed = divided_diff(&e, &[0.0, 0.0, 1.0]).unwrap();
        // (e − 1 − 1)/1
        assert!((mixed - (1f64.exp() - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn missing_derivative_reported() {
        let f = ScalarFunction::Custom(super::super::functions::CustomFunction {
            name: "id".into(),
            value: std::sync::Arc::new(|x| x),
            derivs: vec![],
        });
        assert!(matches!(divided_diff(&f, &[1.0, 1.0]), Err(Error::MissingDerivative(1))));
        assert!((divided_diff(&f, &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn data_version_matches_function_version() {
        let f = ScalarFunction::NegHalfSquareExp;
        let x = [0.3, -1.2, 2.0, 0.9];
        let y: Vec<f64> = x.iter().map(|&v| f.value(v)).collect();
        let a = divided_diff_data(&x, &y, &[0, 1, 2, 3]);
        let b = divided_diff(&f, &x).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
