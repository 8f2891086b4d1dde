//! Noise sensitivity and average sensitivity of cube functions.

use rand::Rng;

use super::engine::{mc_means, uniform_signs, EstimatorConfig, EstimatorReport};
use crate::error::{Error, Result};
use crate::spectrahedron::CubeFunction;

#[derive(Default)]
struct PairScratch {
    x: Vec<i8>,
    y: Vec<i8>,
    u: Vec<f64>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::Input(format!("epsilon must lie in [0, 1/2], got {eps}")));
    }
    Ok(())
}

/// `NS_ε` at every `ε` in `eps` from common samples.
///
/// Each draw fixes a uniform `x` and one uniform `uᵢ` per coordinate; `y_ε`
/// flips exactly the coordinates with `uᵢ < ε`, so the flip sets are nested
/// across the grid.
pub fn noise_sensitivity_curve<F: CubeFunction + ?Sized>(
    f: &F,
    eps: &[f64],
    cfg: &EstimatorConfig,
) -> Result<Vec<EstimatorReport>> {
    for &e in eps {
        check_eps(e)?;
    }
    let n = f.n_vars();
    let sub = cfg.derive("noise-sensitivity");
    let means = mc_means(&sub, eps.len(), |s: &mut PairScratch, rng, _, out| {
        s.x.resize(n, 1);
        uniform_signs(rng, &mut s.x);
        s.u.clear();
        s.u.extend((0..n).map(|_| rng.gen::<f64>()));
        let fx = f.eval_signs(&s.x);
        for (o, &e) in out.iter_mut().zip(eps) {
            s.y.clear();
            s.y.extend(s.x.iter().zip(&s.u).map(|(&xi, &ui)| if ui < e { -xi } else { xi }));
            *o = (f.eval_signs(&s.y) != fx) as u8 as f64;
        }
    })?;
    let radius = cfg.radius(cfg.samples);
    Ok(means
        .into_iter()
        .zip(eps)
        .map(|(m, &e)| EstimatorReport::new(m, radius, cfg.samples, cfg.master_seed).with("epsilon", e))
        .collect())
}

/// `NS_ε(f) = Pr[f(x) ≠ f(y)]` for an `ε`-correlated pair.
pub fn noise_sensitivity<F: CubeFunction + ?Sized>(f: &F, eps: f64, cfg: &EstimatorConfig) -> Result<EstimatorReport> {
    Ok(noise_sensitivity_curve(f, &[eps], cfg)?.remove(0))
}

/// `AS(f) = n·Pr_{x,i}[f(x) ≠ f(x ⊕ eᵢ)]`; estimate and radius are both scaled by `n`.
pub fn average_sensitivity<F: CubeFunction + ?Sized>(f: &F, cfg: &EstimatorConfig) -> Result<EstimatorReport> {
    let n = f.n_vars();
    if n == 0 {
        return Err(Error::Input("function has no variables".into()));
    }
    let sub = cfg.derive("average-sensitivity");
    let m = mc_means(&sub, 1, |s: &mut PairScratch, rng, _, out| {
        s.x.resize(n, 1);
        uniform_signs(rng, &mut s.x);
        let i = rng.gen_range(0..n);
        let fx = f.eval_signs(&s.x);
        s.x[i] = -s.x[i];
        out[0] = (f.eval_signs(&s.x) != fx) as u8 as f64;
    })?;
    let scale = n as f64;
    Ok(EstimatorReport::new(scale * m[0], scale * cfg.radius(cfg.samples), cfg.samples, cfg.master_seed)
        .with("flip_probability", m[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dictator(usize);
    impl CubeFunction for Dictator {
        fn n_vars(&self) -> usize {
            self.0
        }
        fn eval_signs(&self, x: &[i8]) -> bool {
            x[0] == -1
        }
        fn eval_real(&self, x: &[f64]) -> bool {
            x[0] < 0.0
        }
    }

    struct Constant;
    impl CubeFunction for Constant {
        fn n_vars(&self) -> usize {
            5
        }
        fn eval_signs(&self, _: &[i8]) -> bool {
            true
        }
        fn eval_real(&self, _: &[f64]) -> bool {
            true
        }
    }

    #[test]
    fn dictator_average_sensitivity_is_one() {
        let r = average_sensitivity(&Dictator(8), &EstimatorConfig::new(40_000, 1)).unwrap();
        assert!(r.contains(1.0), "{r:?}");
    }

    #[test]
    fn constant_is_insensitive() {
        let cfg = EstimatorConfig::new(1000, 2);
        assert_eq!(average_sensitivity(&Constant, &cfg).unwrap().estimate, 0.0);
        assert_eq!(noise_sensitivity(&Constant, 0.3, &cfg).unwrap().estimate, 0.0);
    }

    #[test]
    fn zero_noise() {
        let r = noise_sensitivity(&Dictator(4), 0.0, &EstimatorConfig::new(1000, 2)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn dictator_noise_sensitivity_is_eps() {
        let r = noise_sensitivity(&Dictator(4), 0.2, &EstimatorConfig::new(50_000, 3)).unwrap();
        assert!(r.contains(0.2), "{r:?}");
    }

    #[test]
    fn eps_range_checked() {
        assert!(noise_sensitivity(&Dictator(4), 0.6, &EstimatorConfig::new(10, 3)).is_err());
    }
}
