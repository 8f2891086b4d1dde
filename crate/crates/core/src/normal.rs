//! The standard normal CDF `g`, its derivatives, the ratio `ḡ = g'/g`, and
//! inverse-CDF Gaussian sampling.

use libm::erfc;
use rand::RngCore;
use statrs::function::erf::erfc_inv;

pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `ln √(2π)`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this point `log_g` switches to the Mills-ratio tail.
pub const TAIL_CUTOFF: f64 = -8.0;
/// Below this point `gbar` is the reciprocal Mills ratio. The direct quotient
/// `φ(x)/g(x)` inherits a relative error of order `x²·ε` from `exp(−x²/2)`.
pub const GBAR_CF_CUTOFF: f64 = -2.0;

/// Standard normal CDF.
pub fn g(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 − g(x)`, accurate for large positive `x`.
pub fn g_upper(x: f64) -> f64 {
    g(-x)
}

/// `Q(t)/φ(t)` for `t ≥ 1` by the Laplace continued fraction (modified Lentz).
fn mills_ratio(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for j in 1..2000 {
        let a = j as f64;
        d = t + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = t + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln g(x)`, stable far into the lower tail.
pub fn log_g(x: f64) -> f64 {
    if x < TAIL_CUTOFF {
        let t = -x;
        -0.5 * t * t - LN_SQRT_2PI + mills_ratio(t).ln()
    } else if x > 0.0 {
        (-g_upper(x)).ln_1p()
    } else {
        g(x).ln()
    }
}

/// `ln g'(x)`
pub fn log_g_d1(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `(g', g'', g''')` at `x`.
pub fn g_derivs(x: f64) -> (f64, f64, f64) {
    let phi = FRAC_1_SQRT_2PI * (-0.5 * x * x).exp();
    (phi, -x * phi, (x * x - 1.0) * phi)
}

/// `ḡ(x) = g'(x)/g(x)`
pub fn gbar(x: f64) -> f64 {
    if x < GBAR_CF_CUTOFF {
        1.0 / mills_ratio(-x)
    } else {
        g_derivs(x).0 / g(x)
    }
}

/// `ḡ'(x) = −(x + ḡ)ḡ`
pub fn gbar_d1(x: f64) -> f64 {
    let b = gbar(x);
    -(x + b) * b
}

/// `ḡ''(x) = (x² − 1)ḡ + 3xḡ² + 2ḡ³`
pub fn gbar_d2(x: f64) -> f64 {
    let b = gbar(x);
    (x * x - 1.0) * b + 3.0 * x * b * b + 2.0 * b * b * b
}

/// Inverse of the standard normal CDF on `(0, 1)`.
pub fn inverse_g(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// Uniform in the open interval `(0, 1)` from the top 53 bits of one word.
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// One standard Gaussian draw by inverse CDF, consuming exactly one `u64`.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    inverse_g(open_unit(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_and_symmetry() {
        assert_eq!(g(0.0), 0.5);
        for x in [0.5, 1.0, 3.0] {
            assert!((g(x) + g(-x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_closed_forms() {
        let (d1, d2, _) = g_derivs(0.0);
        assert!((d1 - 0.398_942_280_4).abs() < 1e-10);
        assert_eq!(d2, 0.0);
        assert_eq!(g_derivs(1.0).2, 0.0);
    }

    #[test]
    fn tail_switch_is_continuous() {
        let below = log_g(TAIL_CUTOFF - 1e-12);
        let above = log_g(TAIL_CUTOFF + 1e-12);
        assert!(((below - above) / above).abs() < 1e-12);
    }

    #[test]
    fn gbar_switch_is_continuous() {
        let below = gbar(GBAR_CF_CUTOFF - 1e-12);
        let above = gbar(GBAR_CF_CUTOFF + 1e-12);
        assert!(((below - above) / above).abs() < 1e-11);
    }

    #[test]
    fn gbar_at_zero() {
        assert!((gbar(0.0) - 2.0 * FRAC_1_SQRT_2PI).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        for p in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
            let x = inverse_g(p);
            assert!(((g(x) - p) / p).abs() < 1e-9, "p={p}");
        }
    }
}
