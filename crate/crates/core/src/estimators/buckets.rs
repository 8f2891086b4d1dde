//! Random bucketing of coordinates: the signed split used to expose
//! unateness, and the goodness of buckets for a regular positive
//! spectrahedron.

use rand::Rng;
use rand::RngCore;

use super::engine::{mc_means, EstimatorConfig, EstimatorReport};
use crate::error::{Error, Result};
use crate::linalg::{lambda_min, SymMatrix};
use crate::spectrahedron::{check_regularity, PositiveSpectrahedron};

/// `2m` index sets: bucket `c` of the hash contributes `C̃_{2c}` (coordinates
/// with `zⱼ = +1`) and `C̃_{2c+1}` (coordinates with `zⱼ = −1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketSplit {
    pub buckets: Vec<Vec<usize>>,
}

impl BucketSplit {
    pub fn m(&self) -> usize {
        self.buckets.len() / 2
    }

    /// `Σ_{j ∈ C̃_q} zⱼ Aʲ` for every `q`.
    pub fn induced_coeffs(&self, z: &[i8], coeffs: &[SymMatrix<f64>]) -> Result<Vec<SymMatrix<f64>>> {
        if z.len() != coeffs.len() {
            return Err(Error::Dimension { expected: coeffs.len(), got: z.len() });
        }
        let k = coeffs.first().map_or(0, SymMatrix::dim);
        Ok(self
            .buckets
            .iter()
            .map(|b| {
                let mut s = SymMatrix::zeros(k);
                for &j in b {
                    s.axpy(z[j] as f64, &coeffs[j]);
                }
                s
            })
            .collect())
    }
}

/// Hashes each coordinate into one of `m` buckets uniformly, then splits every
/// bucket by the sign of `z`.
pub fn bucket_split(z: &[i8], m: usize, rng: &mut impl RngCore) -> Result<BucketSplit> {
    if m == 0 {
        return Err(Error::Input("need at least one bucket".into()));
    }
    let mut buckets = vec![Vec::new(); 2 * m];
    for (j, &zj) in z.iter().enumerate() {
        let c = rng.gen_range(0..m);
        buckets[2 * c + (zj < 0) as usize].push(j);
    }
    Ok(BucketSplit { buckets })
}

/// Smallest bucket count in the lemma's regime, `⌈1/(10τ²·log₂k)⌉`.
pub fn recommended_buckets(tau: f64, k: usize) -> usize {
    let lg = (k.max(2) as f64).log2();
    (1.0 / (10.0 * tau * tau * lg)).ceil().max(1.0) as usize
}

#[derive(Default)]
struct Scratch {
    sigma: Vec<SymMatrix<f64>>,
}

/// Fraction of random hashes `π: [n] → [m]` under which more than `3m/4`
/// buckets are good, i.e. `σ_c = Σ_{j ∈ π⁻¹(c)} Aʲ ⪰ I/(2τm)` (PSD normal form).
///
/// `τ` is the declared regularity parameter when present, the measured one
/// otherwise. `trials` replaces `cfg.samples`.
pub fn bucket_goodness(
    s: &PositiveSpectrahedron<f64>,
    m: usize,
    trials: u64,
    cfg: &EstimatorConfig,
) -> Result<EstimatorReport> {
    if m == 0 {
        return Err(Error::Input("need at least one bucket".into()));
    }
    let tau = match s.declared() {
        Some(d) => d.tau,
        None => check_regularity(s)?.tau_actual,
    };
    let coeffs = s.normal_form_coeffs();
    let k = s.k();
    let threshold = 1.0 / (2.0 * tau * m as f64);
    let sub = EstimatorConfig { samples: trials, ..cfg.derive("buckets") };
    let means = mc_means(&sub, 2, |sc: &mut Scratch, rng, _, out| {
        if sc.sigma.len() != m {
            sc.sigma = vec![SymMatrix::zeros(k); m];
        } else {
            sc.sigma.iter_mut().for_each(|x| *x = SymMatrix::zeros(k));
        }
        for a in &coeffs {
            sc.sigma[rng.gen_range(0..m)].axpy(1.0, a);
        }
        let good = sc.sigma.iter().filter(|x| lambda_min(x).expect("finite") >= threshold).count();
        out[0] = (4 * good > 3 * m) as u8 as f64;
        out[1] = good as f64 / m as f64;
    })?;
    Ok(EstimatorReport::new(means[0], cfg.radius(trials), trials, cfg.master_seed)
        .with("m", m)
        .with("tau", tau)
        .with("threshold", threshold)
        .with("mean_good_fraction", means[1])
        .with("lemma_bound", 1.0 - (-(m as f64) / 4.0).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrahedron::{Declared, Sign};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bucket_is_sign_split() {
        let z = [1, -1, -1, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = bucket_split(&z, 1, &mut rng).unwrap();
        assert_eq!(s.buckets, vec![vec![0, 3, 4], vec![1, 2]]);
    }

    #[test]
    fn all_ones_leave_negative_buckets_empty() {
        let z = [1i8; 30];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = bucket_split(&z, 4, &mut rng).unwrap();
        assert!(s.buckets.iter().skip(1).step_by(2).all(Vec::is_empty));
        assert_eq!(s.buckets.iter().map(Vec::len).sum::<usize>(), 30);
    }

    #[test]
    fn single_coordinate_is_good() {
        let a = SymMatrix::scaled_identity(2, 1.0);
        let s = PositiveSpectrahedron::new(vec![a], SymMatrix::zeros(2), Sign::Psd).unwrap();
        let s = s.with_declared(Declared { tau: 1.0, m_width: 1.0, gamma: 0.0 }).unwrap();
        let r = bucket_goodness(&s, 1, 50, &EstimatorConfig::new(1, 3)).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn too_many_buckets_are_bad() {
        let coeffs = vec![SymMatrix::scaled_identity(2, 0.01); 5];
        let s = PositiveSpectrahedron::new(coeffs, SymMatrix::zeros(2), Sign::Psd).unwrap();
        let r = bucket_goodness(&s, 50, 200, &EstimatorConfig::new(1, 3)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn regime_formula() {
        assert_eq!(recommended_buckets(0.01, 2), 1000);
    }
}
