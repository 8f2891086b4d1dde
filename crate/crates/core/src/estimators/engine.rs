//! Chunked, thread-count independent Monte-Carlo engine.

use std::collections::BTreeMap;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normal::inverse_g;

pub const DEFAULT_CHUNK: u64 = 4096;
pub const DEFAULT_CONFIDENCE: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub chunk_size: u64,
    pub confidence: f64,
}

impl EstimatorConfig {
    pub fn new(samples: u64, master_seed: u64) -> Self {
        Self { samples, master_seed, chunk_size: DEFAULT_CHUNK, confidence: DEFAULT_CONFIDENCE }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    /// Same settings with the seed replaced by a labeled sub-seed.
    pub fn derive(&self, label: &str) -> Self {
        Self { master_seed: derive_seed(self.master_seed, label), ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Input("samples must be positive".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::Input("chunk_size must be positive".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Input(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        Ok(())
    }

    /// Hoeffding radius for `n` samples of a `[0, 1]` quantity.
    pub fn radius(&self, n: u64) -> f64 {
        hoeffding_radius(n, self.confidence)
    }

    /// Two-sided normal quantile matching `confidence`.
    pub fn z_score(&self) -> f64 {
        inverse_g(1.0 - 0.5 * (1.0 - self.confidence))
    }
}

/// `sqrt(ln(2/(1−conf)) / (2N))`
pub fn hoeffding_radius(n: u64, confidence: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub radius: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub metadata: BTreeMap<String, String>,
}

impl EstimatorReport {
    pub fn new(estimate: f64, radius: f64, n_samples: u64, seed: u64) -> Self {
        Self { estimate, radius, n_samples, seed, metadata: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn contains(&self, truth: f64) -> bool {
        (self.estimate - truth).abs() <= self.radius
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for `label`: FNV-1a of the label mixed into the master seed.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ splitmix64(h))
}

/// Counter stream for one chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums a vector-valued sample function over indices `0..total`.
///
/// Indices are cut into chunks of `chunk_size`; chunk `c` draws from
/// [`chunk_rng`]`(seed, c)` and owns a fresh `S` scratch value. Chunk sums are
/// combined in chunk order, so the result does not depend on the thread count.
/// `f` receives a zeroed output slice of length `dim` for every index.
pub fn chunked_sums<S, F>(total: u64, chunk_size: u64, seed: u64, dim: usize, f: F) -> Vec<f64>
where
    S: Default,
    F: Fn(&mut S, &mut ChaCha8Rng, u64, &mut [f64]) + Sync,
{
    let chunk = chunk_size.max(1);
    let n_chunks = total.div_ceil(chunk);
    let partial: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut scratch = S::default();
            let mut out = vec![0.0; dim];
            let mut acc = vec![Neumaier::default(); dim];
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            for idx in lo..hi {
                out.iter_mut().for_each(|o| *o = 0.0);
                f(&mut scratch, &mut rng, idx, &mut out);
                for (a, &o) in acc.iter_mut().zip(&out) {
                    a.add(o);
                }
            }
            acc.iter().map(Neumaier::value).collect()
        })
        .collect();
    let mut total_acc = vec![Neumaier::default(); dim];
    for p in &partial {
        for (a, &v) in total_acc.iter_mut().zip(p) {
            a.add(v);
        }
    }
    total_acc.iter().map(Neumaier::value).collect()
}

/// Means over `cfg.samples` draws; see [`chunked_sums`].
pub fn mc_means<S, F>(cfg: &EstimatorConfig, dim: usize, f: F) -> Result<Vec<f64>>
where
    S: Default,
    F: Fn(&mut S, &mut ChaCha8Rng, u64, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let sums = chunked_sums(cfg.samples, cfg.chunk_size, cfg.master_seed, dim, f);
    Ok(sums.into_iter().map(|s| s / cfg.samples as f64).collect())
}

/// Fills `x` with independent uniform signs, 64 per word.
pub fn uniform_signs(rng: &mut impl RngCore, x: &mut [i8]) {
    for block in x.chunks_mut(64) {
        let mut bits = rng.next_u64();
        for v in block {
            *v = if bits & 1 == 1 { -1 } else { 1 };
            bits >>= 1;
        }
    }
}

/// Cube point number `idx`: bit `i` set means `xᵢ = −1`.
pub fn signs_from_index(idx: u64, x: &mut [i8]) {
    for (i, v) in x.iter_mut().enumerate() {
        *v = if (idx >> i) & 1 == 1 { -1 } else { 1 };
    }
}
