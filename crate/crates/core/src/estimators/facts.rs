//! Monte-Carlo checks of three matrix concentration facts: the moment bound
//! for Rademacher/Gaussian matrix series, matrix Rosenthal, and matrix
//! Chernoff (lower tail).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::anticonc::RealSource;
use super::engine::{chunked_sums, mc_means, uniform_signs, EstimatorConfig};
use crate::error::{Error, Result};
use crate::linalg::{eigvals_sym, lambda_max, lambda_min, Mat, SymMatrix};
use crate::normal::standard_normal;
use crate::prg::mz::ceil_log2;

/// Outcome of one fact at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct FactCheck {
    pub fact: &'static str,
    /// `m`, `p` or `δ`
    pub param: f64,
    pub variant: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub radius: f64,
    pub n_samples: u64,
    pub pass: bool,
}

/// Random inputs for one round of checks: `n` symmetric matrices, `n` PSD
/// matrices and `n` keep-probabilities in `[0.2, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactFamily {
    pub sym: Vec<SymMatrix<f64>>,
    pub psd: Vec<SymMatrix<f64>>,
    pub keep: Vec<f64>,
}

pub fn random_fact_family(n: usize, k: usize, seed: u64) -> Result<FactFamily> {
    if n == 0 || k < 2 {
        return Err(Error::Input(format!("need n >= 1 and k >= 2, got n={n}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng| {
        let data: Vec<f64> = (0..k * k).map(|_| standard_normal(rng)).collect();
        Mat::from_row_major(k, data).expect("k*k entries")
    };
    let mut sym = Vec::with_capacity(n);
    let mut psd = Vec::with_capacity(n);
    for _ in 0..n {
        let s: f64 = rng.gen_range(0.2..1.0);
        sym.push(gauss(&mut rng).symmetric_part().scale(s));
        let w = gauss(&mut rng);
        let s: f64 = rng.gen_range(0.2..1.0);
        psd.push(w.matmul(&w.transpose()).symmetric_part().scale(s / k as f64));
    }
    let keep = (0..n).map(|_| rng.gen_range(0.2..=1.0)).collect();
    Ok(FactFamily { sym, psd, keep })
}

fn check_family(coeffs: &[SymMatrix<f64>]) -> Result<usize> {
    let k = coeffs.first().ok_or_else(|| Error::Input("empty matrix family".into()))?.dim();
    if coeffs.iter().any(|a| a.dim() != k) {
        return Err(Error::Input("matrices of different sizes".into()));
    }
    Ok(k)
}

fn sum_of_squares(coeffs: &[SymMatrix<f64>], weights: Option<&[f64]>) -> SymMatrix<f64> {
    let mut s = SymMatrix::zeros(coeffs[0].dim());
    for (i, a) in coeffs.iter().enumerate() {
        s.axpy(weights.map_or(1.0, |w| w[i]), &a.square());
    }
    s
}

fn schatten_pow(m: &SymMatrix<f64>, q: f64) -> f64 {
    eigvals_sym(m).expect("finite").iter().map(|l| l.abs().powf(q)).sum()
}

/// `(1 + 2m⌈log₂k⌉)^{m/2} · ‖Σᵢ(Aⁱ)²‖^{m/2}`
pub fn moment_rhs(coeffs: &[SymMatrix<f64>], m: u32) -> Result<f64> {
    let k = check_family(coeffs)?;
    let norm = lambda_max(&sum_of_squares(coeffs, None))?;
    let c = 1.0 + 2.0 * m as f64 * ceil_log2(k) as f64;
    Ok((c * norm).powf(m as f64 / 2.0))
}

/// Mean and confidence radius (normal approximation) from first and second moment sums.
fn mean_and_radius(sum: f64, sum_sq: f64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    (mean, z * (var / nf).sqrt())
}

/// `LHS ≤ RHS·(1 + 3·radius/LHS)`
fn moment_pass(lhs: f64, rhs: f64, radius: f64) -> bool {
    let rel = if lhs > 0.0 { radius / lhs } else { 0.0 };
    lhs <= rhs * (1.0 + 3.0 * rel)
}

/// `E‖Σᵢ ξᵢAⁱ‖^m` against [`moment_rhs`] for each `m` in `moments`, with
/// Rademacher (`Uniform`) or Gaussian `ξ`. Needs `k ≥ 2`.
pub fn moment_bound_checks(
    coeffs: &[SymMatrix<f64>],
    moments: &[u32],
    source: RealSource,
    cfg: &EstimatorConfig,
) -> Result<Vec<FactCheck>> {
    let k = check_family(coeffs)?;
    if k < 2 {
        return Err(Error::Input("the moment bound needs k >= 2".into()));
    }
    let n = coeffs.len();
    let dim = moments.len();
    let label = match source {
        RealSource::Uniform => "facts/moment/uniform",
        RealSource::Gaussian => "facts/moment/gaussian",
    };
    let sub = cfg.derive(label);
    sub.validate()?;
    let sums = chunked_sums(sub.samples, sub.chunk_size, sub.master_seed, 2 * dim, |x: &mut Vec<i8>, rng, _, out| {
        let mut s = SymMatrix::zeros(k);
        match source {
            RealSource::Uniform => {
                x.resize(n, 1);
                uniform_signs(rng, x);
                for (a, &xi) in coeffs.iter().zip(x.iter()) {
                    s.axpy(xi as f64, a);
                }
            }
            RealSource::Gaussian => {
                for a in coeffs {
                    s.axpy(standard_normal(rng), a);
                }
            }
        }
        let nu = s.spectral_norm().expect("finite");
        for (j, &m) in moments.iter().enumerate() {
            let v = nu.powi(m as i32);
            out[j] = v;
            out[dim + j] = v * v;
        }
    });
    let z = cfg.z_score();
    let variant = match source {
        RealSource::Uniform => "rademacher",
        RealSource::Gaussian => "gaussian",
    };
    moments
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let (lhs, radius) = mean_and_radius(sums[j], sums[dim + j], sub.samples, z);
            let rhs = moment_rhs(coeffs, m)?;
            Ok(FactCheck {
                fact: "moment",
                param: m as f64,
                variant,
                lhs,
                rhs,
                radius,
                n_samples: sub.samples,
                pass: moment_pass(lhs, rhs, radius),
            })
        })
        .collect()
}

/// `√(4p−1)‖(Σᵢ E Xᵢ²)^{1/2}‖_{4p} + (4p−1)(Σᵢ E‖Xᵢ‖_{4p}^{4p})^{1/(4p)}` for
/// `Xᵢ = ξᵢAⁱ` where `ξᵢ` is a random sign kept with probability `keepᵢ`.
pub fn rosenthal_rhs(coeffs: &[SymMatrix<f64>], keep: &[f64], p: u32) -> Result<f64> {
    check_family(coeffs)?;
    if keep.len() != coeffs.len() {
        return Err(Error::Dimension { expected: coeffs.len(), got: keep.len() });
    }
    let q = 4.0 * p as f64;
    let var = sum_of_squares(coeffs, Some(keep));
    // ‖S^{1/2}‖_q^q = Σ λ(S)^{q/2}
    let first = schatten_pow(&var, q / 2.0).powf(1.0 / q);
    let second: f64 = coeffs.iter().zip(keep).map(|(a, &w)| w * schatten_pow(a, q)).sum();
    Ok((q - 1.0).sqrt() * first + (q - 1.0) * second.powf(1.0 / q))
}

/// Exact `(E‖Σᵢ xᵢAⁱ‖_{4p}^{4p})^{1/(4p)}` over uniform signs, by enumeration (`n ≤ 24`).
pub fn rosenthal_lhs_exact(coeffs: &[SymMatrix<f64>], p: u32) -> Result<f64> {
    let k = check_family(coeffs)?;
    let n = coeffs.len();
    if n > 24 {
        return Err(Error::Input(format!("enumeration needs n <= 24, got {n}")));
    }
    let q = 4.0 * p as f64;
    // x and −x give the same norm, so fix x₁ = +1
    let half = 1u64 << (n - 1);
    let sums = chunked_sums(half, 1024, 0, 1, |_: &mut (), _, idx, out| {
        let mut s = coeffs[0].clone();
        for (i, a) in coeffs.iter().enumerate().skip(1) {
            s.axpy(if (idx >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 }, a);
        }
        debug_assert_eq!(s.dim(), k);
        out[0] = schatten_pow(&s, q);
    });
    Ok((sums[0] / half as f64).powf(1.0 / q))
}

/// Matrix Rosenthal for `Xᵢ = ξᵢAⁱ`, `ξᵢ ∈ {−1, 0, +1}` with
/// `Pr[ξᵢ = ±1] = keepᵢ/2`.
///
/// The MC radius is computed for `E‖ΣXᵢ‖_{4p}^{4p}` and mapped to the
/// `1/(4p)`-th root to first order.
pub fn rosenthal_check(coeffs: &[SymMatrix<f64>], keep: &[f64], p: u32, cfg: &EstimatorConfig) -> Result<FactCheck> {
    let rhs = rosenthal_rhs(coeffs, keep, p)?;
    let k = coeffs[0].dim();
    let q = 4.0 * p as f64;
    let sub = cfg.derive(&format!("facts/rosenthal/{p}"));
    sub.validate()?;
    let sums = chunked_sums(sub.samples, sub.chunk_size, sub.master_seed, 2, |_: &mut (), rng, _, out| {
        let mut s = SymMatrix::zeros(k);
        for (a, &w) in coeffs.iter().zip(keep) {
            let u: f64 = rng.gen();
            if u < w {
                s.axpy(if u < 0.5 * w { 1.0 } else { -1.0 }, a);
            }
        }
        let v = schatten_pow(&s, q);
        out[0] = v;
        out[1] = v * v;
    });
    let (mean, radius) = mean_and_radius(sums[0], sums[1], sub.samples, cfg.z_score());
    let lhs = mean.powf(1.0 / q);
    let lhs_radius = if mean > 0.0 { lhs * radius / (q * mean) } else { 0.0 };
    Ok(FactCheck {
        fact: "rosenthal",
        param: p as f64,
        variant: "sparse-rademacher",
        lhs,
        rhs,
        radius: lhs_radius,
        n_samples: sub.samples,
        pass: moment_pass(lhs, rhs, lhs_radius),
    })
}

/// `k·(e^{−δ}/(1−δ)^{1−δ})^{μ/R}`
pub fn chernoff_rhs(k: usize, delta: f64, mu: f64, r: f64) -> f64 {
    let base = (-delta).exp() / (1.0 - delta).powf(1.0 - delta);
    k as f64 * base.powf(mu / r)
}

/// Matrix Chernoff lower tail for `Xᵢ = bᵢAⁱ` with `bᵢ ~ Bernoulli(keepᵢ)` and
/// PSD `Aⁱ`; `R = maxᵢ‖Aⁱ‖` and `μ = λ_min(Σᵢ keepᵢAⁱ)`.
///
/// Passes iff `p̂ − 3·radius ≤ RHS` with the Hoeffding radius.
pub fn chernoff_check(psd: &[SymMatrix<f64>], keep: &[f64], delta: f64, cfg: &EstimatorConfig) -> Result<FactCheck> {
    let k = check_family(psd)?;
    if keep.len() != psd.len() {
        return Err(Error::Dimension { expected: psd.len(), got: keep.len() });
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Input(format!("delta must lie in [0, 1), got {delta}")));
    }
    let mut mean = SymMatrix::zeros(k);
    let mut r = 0.0f64;
    for (a, &w) in psd.iter().zip(keep) {
        if lambda_min(a)? < -1e-9 {
            return Err(Error::Input("Chernoff check needs PSD summands".into()));
        }
        mean.axpy(w, a);
        r = r.max(lambda_max(a)?);
    }
    let mu = lambda_min(&mean)?;
    let rhs = chernoff_rhs(k, delta, mu, r);
    let level = (1.0 - delta) * mu;
    let sub = cfg.derive(&format!("facts/chernoff/{delta}"));
    let m = mc_means(&sub, 1, |_: &mut (), rng, _, out| {
        let mut s = SymMatrix::zeros(k);
        for (a, &w) in psd.iter().zip(keep) {
            if rng.gen::<f64>() < w {
                s.axpy(1.0, a);
            }
        }
        out[0] = (lambda_min(&s).expect("finite") <= level) as u8 as f64;
    })?;
    let radius = cfg.radius(sub.samples);
    Ok(FactCheck {
        fact: "chernoff",
        param: delta,
        variant: "bernoulli",
        lhs: m[0],
        rhs,
        radius,
        n_samples: sub.samples,
        pass: m[0] - 3.0 * radius <= rhs,
    })
}

/// Every check on one family: moments (Rademacher and Gaussian), Rosenthal
/// for each `p`, Chernoff for each `δ`.
pub fn matrix_fact_checks(
    family: &FactFamily,
    moments: &[u32],
    ps: &[u32],
    deltas: &[f64],
    cfg: &EstimatorConfig,
) -> Result<Vec<FactCheck>> {
    let mut out = moment_bound_checks(&family.sym, moments, RealSource::Uniform, cfg)?;
    out.extend(moment_bound_checks(&family.sym, moments, RealSource::Gaussian, cfg)?);
    for &p in ps {
        out.push(rosenthal_check(&family.sym, &family.keep, p, cfg)?);
    }
    for &d in deltas {
        out.push(chernoff_check(&family.psd, &family.keep, d, cfg)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_matrix_moment() {
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let norm = a.spectral_norm().unwrap();
        let r = moment_bound_checks(&[a], &[2, 4], RealSource::Uniform, &EstimatorConfig::new(100, 1)).unwrap();
        for c in &r {
            assert!((c.lhs - norm.powf(c.param)).abs() < 1e-9 * c.lhs);
            assert!(c.radius <= 1e-6 * c.lhs);
            assert!(c.pass && c.rhs >= c.lhs);
        }
    }

    #[test]
    fn moment_bound_rejects_scalars() {
        let a = SymMatrix::diag(&[1.0]);
        assert!(moment_bound_checks(&[a], &[2], RealSource::Uniform, &EstimatorConfig::new(10, 1)).is_err());
    }

    #[test]
    fn chernoff_rhs_at_zero_delta() {
        assert_eq!(chernoff_rhs(3, 0.0, 5.0, 1.0), 3.0);
    }

    #[test]
    fn family_shapes() {
        let f = random_fact_family(7, 3, 2).unwrap();
        assert_eq!((f.sym.len(), f.psd.len(), f.keep.len()), (7, 7, 7));
        assert!(f.psd.iter().all(|a| lambda_min(a).unwrap() >= -1e-12));
    }

    #[test]
    fn rosenthal_mc_matches_enumeration() {
        let f = random_fact_family(10, 3, 4).unwrap();
        let exact = rosenthal_lhs_exact(&f.sym, 1).unwrap();
        let mc = rosenthal_check(&f.sym, &[1.0; 10], 1, &EstimatorConfig::new(20_000, 5)).unwrap();
        assert!((mc.lhs - exact).abs() < 3.0 * mc.radius + 1e-12, "{} vs {exact} ± {}", mc.lhs, mc.radius);
    }
}
