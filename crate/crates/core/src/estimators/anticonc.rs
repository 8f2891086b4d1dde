//! Anti-concentration of `λ_max` for a PSD/NSD pair.

use super::engine::{mc_means, uniform_signs, EstimatorConfig, EstimatorReport};
use crate::error::{Error, Result};
use crate::normal::standard_normal;
use crate::spectrahedron::SpectrahedronPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealSource {
    Uniform,
    Gaussian,
}

#[derive(Default)]
struct Scratch {
    x: Vec<i8>,
    g: Vec<f64>,
}

/// `Pr[∃j: λ_max(Σᵢ xᵢAⁱⱼ − Bⱼ) ∈ (−Λ, Λ]]` at every `Λ` in `lambdas`.
///
/// All grid points share the same draws, so the curve is non-decreasing in `Λ`.
pub fn anti_concentration_curve(
    pair: &SpectrahedronPair<f64>,
    lambdas: &[f64],
    source: RealSource,
    cfg: &EstimatorConfig,
) -> Result<Vec<EstimatorReport>> {
    if let Some(&bad) = lambdas.iter().find(|&&l| l.is_nan() || l <= 0.0) {
        return Err(Error::Input(format!("Lambda must be positive, got {bad}")));
    }
    let n = pair.n();
    let label = match source {
        RealSource::Uniform => "anticonc/uniform",
        RealSource::Gaussian => "anticonc/gaussian",
    };
    let sub = cfg.derive(label);
    let means = mc_means(&sub, lambdas.len(), |s: &mut Scratch, rng, _, out| {
        let (l1, l2) = match source {
            RealSource::Uniform => {
                s.x.resize(n, 1);
                uniform_signs(rng, &mut s.x);
                (
                    pair.psd().lambda_max_at_signs(&s.x).expect("length n"),
                    pair.nsd().lambda_max_at_signs(&s.x).expect("length n"),
                )
            }
            RealSource::Gaussian => {
                s.g.clear();
                s.g.extend((0..n).map(|_| standard_normal(rng)));
                (pair.psd().lambda_max_at(&s.g).expect("length n"), pair.nsd().lambda_max_at(&s.g).expect("length n"))
            }
        };
        for (o, &lam) in out.iter_mut().zip(lambdas) {
            let hit = |l: f64| -lam < l && l <= lam;
            *o = (hit(l1) || hit(l2)) as u8 as f64;
        }
    })?;
    let radius = cfg.radius(cfg.samples);
    Ok(means
        .into_iter()
        .zip(lambdas)
        .map(|(m, &l)| EstimatorReport::new(m, radius, cfg.samples, cfg.master_seed).with("lambda", l))
        .collect())
}

pub fn anti_concentration(
    pair: &SpectrahedronPair<f64>,
    lambda: f64,
    source: RealSource,
    cfg: &EstimatorConfig,
) -> Result<EstimatorReport> {
    Ok(anti_concentration_curve(pair, &[lambda], source, cfg)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::random_regular_instance;

    fn pair() -> SpectrahedronPair<f64> {
        let s = random_regular_instance(40, 2, 0.3, 2.0, 0.5, 1).unwrap();
        SpectrahedronPair::with_vacuous_nsd(s).unwrap()
    }

    #[test]
    fn huge_window_is_certain() {
        let p = pair();
        let r = anti_concentration(&p, 1e3, RealSource::Gaussian, &EstimatorConfig::new(2000, 1)).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn tiny_window_is_empty() {
        let p = pair();
        let r = anti_concentration(&p, 1e-9, RealSource::Gaussian, &EstimatorConfig::new(2000, 1)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn curve_is_monotone() {
        let p = pair();
        let grid: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let c = anti_concentration_curve(&p, &grid, RealSource::Uniform, &EstimatorConfig::new(5000, 2)).unwrap();
        assert!(c.windows(2).all(|w| w[0].estimate <= w[1].estimate));
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(anti_concentration(&pair(), 0.0, RealSource::Uniform, &EstimatorConfig::new(10, 1)).is_err());
    }
}
