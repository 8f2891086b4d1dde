//! Acceptance probabilities under uniform, Gaussian, generator and exact
//! inputs, and the fooling error of a generator.

use rand_chacha::ChaCha8Rng;

use super::engine::{chunked_sums, mc_means, signs_from_index, uniform_signs, EstimatorConfig, EstimatorReport};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::normal::standard_normal;
use crate::prg::{MzGenerator, SeedSource, SeedTuple};
use crate::spectrahedron::{CubeFunction, PositiveSpectrahedron};

/// Largest `n` for exhaustive enumeration of the cube.
pub const MAX_EXACT_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    Uniform,
    Gaussian,
    /// Generator outputs over `min(2^r, cap)` seeds.
    Prg {
        gen: MzGenerator,
        cap: u64,
    },
    /// All `2ⁿ` cube points.
    Exact,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::Uniform => "uniform",
            Source::Gaussian => "gaussian",
            Source::Prg { .. } => "prg",
            Source::Exact => "exact",
        }
    }
}

/// Reference side of a fooling-error measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruthSide {
    Exact,
    Uniform,
}

#[derive(Default)]
struct CubeScratch {
    x: Vec<i8>,
    xr: Vec<f64>,
    seed: Option<SeedTuple>,
    fill: Vec<usize>,
}

/// Exact count of accepted cube points.
pub fn exact_accept_count<F: CubeFunction + ?Sized>(f: &F, chunk_size: u64) -> Result<u64> {
    let n = f.n_vars();
    if n > MAX_EXACT_VARS {
        return Err(Error::Input(format!("exact enumeration needs n <= {MAX_EXACT_VARS}, got {n}")));
    }
    let sums = chunked_sums(1u64 << n, chunk_size, 0, 1, |s: &mut CubeScratch, _: &mut ChaCha8Rng, idx, out| {
        s.x.resize(n, 1);
        signs_from_index(idx, &mut s.x);
        out[0] = f.eval_signs(&s.x) as u8 as f64;
    });
    Ok(sums[0] as u64)
}

/// Mean membership of `f` over `source`.
///
/// Exact and exhaustive generator runs report radius 0; sampled runs report
/// the Hoeffding radius. The generator seed stream and the sampling streams
/// use sub-seeds of `cfg.master_seed`.
pub fn accept_prob<F: CubeFunction + ?Sized>(f: &F, source: &Source, cfg: &EstimatorConfig) -> Result<EstimatorReport> {
    let n = f.n_vars();
    let report = match *source {
        Source::Exact => {
            let count = exact_accept_count(f, cfg.chunk_size.max(1))?;
            let total = 1u64 << n;
            EstimatorReport::new(count as f64 / total as f64, 0.0, total, cfg.master_seed).with("accepted", count)
        }
        Source::Uniform => {
            let sub = cfg.derive("accept/uniform");
            let m = mc_means(&sub, 1, |s: &mut CubeScratch, rng, _, out| {
                s.x.resize(n, 1);
                uniform_signs(rng, &mut s.x);
                out[0] = f.eval_signs(&s.x) as u8 as f64;
            })?;
            EstimatorReport::new(m[0], cfg.radius(cfg.samples), cfg.samples, cfg.master_seed)
        }
        Source::Gaussian => {
            let sub = cfg.derive("accept/gaussian");
            let m = mc_means(&sub, 1, |s: &mut CubeScratch, rng, _, out| {
                s.xr.clear();
                s.xr.extend((0..n).map(|_| standard_normal(rng)));
                out[0] = f.eval_real(&s.xr) as u8 as f64;
            })?;
            EstimatorReport::new(m[0], cfg.radius(cfg.samples), cfg.samples, cfg.master_seed)
        }
        Source::Prg { gen, cap } => {
            if gen.n() != n {
                return Err(Error::Dimension { expected: n, got: gen.n() });
            }
            let src = SeedSource::new(&gen, cap, super::engine::derive_seed(cfg.master_seed, "prg/seeds"));
            let total = src.len();
            let sums = chunked_sums(total, cfg.chunk_size.max(1), 0, 1, |s: &mut CubeScratch, _, idx, out| {
                s.x.resize(n, 1);
                s.fill.resize(gen.t_pow2(), 0);
                let seed = s.seed.get_or_insert_with(|| SeedTuple(Vec::new()));
                src.fill(idx, seed);
                gen.generate_into(seed, &mut s.x, &mut s.fill);
                out[0] = f.eval_signs(&s.x) as u8 as f64;
            });
            let radius = if src.is_exhaustive() { 0.0 } else { cfg.radius(total) };
            EstimatorReport::new(sums[0] / total as f64, radius, total, cfg.master_seed)
                .with("exhaustive", src.is_exhaustive())
                .with("seed_bits", gen.seed_length())
                .with("accepted", sums[0] as u64)
        }
    };
    Ok(report.with("source", source.name()))
}

/// `|Pr_truth[accept] − Pr_prg[accept]|` with the sum of the two radii.
pub fn fooling_error<F: CubeFunction + ?Sized>(
    f: &F,
    gen: &MzGenerator,
    cap: u64,
    truth: TruthSide,
    cfg: &EstimatorConfig,
) -> Result<EstimatorReport> {
    let t = match truth {
        TruthSide::Exact => accept_prob(f, &Source::Exact, cfg)?,
        TruthSide::Uniform => accept_prob(f, &Source::Uniform, cfg)?,
    };
    let p = accept_prob(f, &Source::Prg { gen: *gen, cap }, cfg)?;
    let exhaustive = p.metadata.get("exhaustive").cloned().unwrap_or_default();
    Ok(EstimatorReport::new((t.estimate - p.estimate).abs(), t.radius + p.radius, p.n_samples, cfg.master_seed)
        .with("p_truth", t.estimate)
        .with("p_prg", p.estimate)
        .with("truth", if truth == TruthSide::Exact { "exact" } else { "uniform" })
        .with("exhaustive", exhaustive))
}

/// Samples of `λ_max(Σᵢ xᵢAⁱ − B)` over uniform `x`, sorted.
pub fn lambda_max_samples(s: &PositiveSpectrahedron<f64>, samples: u64, seed: u64) -> Result<Vec<f64>> {
    use rand_chacha::rand_core::SeedableRng;
    let n = s.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![1i8; n];
    let mut out = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        uniform_signs(&mut rng, &mut x);
        out.push(s.lambda_max_at_signs(&x)?);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Shifts the offset by a multiple of `I` so that about a `target` fraction
/// of the cube is accepted: `B' = B + q·I` with `q` the empirical
/// `target`-quantile of `λ_max(Σᵢ xᵢAⁱ − B)`.
pub fn calibrate_offset(
    s: &PositiveSpectrahedron<f64>,
    target: f64,
    samples: u64,
    seed: u64,
) -> Result<PositiveSpectrahedron<f64>> {
    if !(target > 0.0 && target < 1.0) || samples == 0 {
        return Err(Error::Input(format!("need target in (0, 1) and samples > 0, got {target}, {samples}")));
    }
    let lm = lambda_max_samples(s, samples, seed)?;
    let pos = ((target * samples as f64).floor() as usize).min(lm.len() - 1);
    // midpoint between neighbouring order statistics keeps the shift off the atoms
    let q = if pos + 1 < lm.len() { 0.5 * (lm[pos] + lm[pos + 1]) } else { lm[pos] };
    let shifted: SymMatrix<f64> = s.offset().shift(q);
    s.with_offset(shifted)
}
