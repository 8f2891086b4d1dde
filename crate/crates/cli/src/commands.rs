use std::path::Path;

use anyhow::{Context, Result};

use rand::RngCore;

use spectra_core::estimators::{
    anti_concentration_curve, average_sensitivity, bucket_goodness, chunk_rng, derive_seed, fooling_error,
    matrix_fact_checks, noise_sensitivity_curve, random_fact_family, recommended_buckets, EstimatorConfig, RealSource,
    TruthSide, MAX_EXACT_VARS,
};
use spectra_core::instance::{random_regular_instance, read_instance_file, write_instance};
use spectra_core::mollifier::{sandwich_check, MollifierParams, Region};
use spectra_core::normal::standard_normal;
use spectra_core::prg::gf2::{is_irreducible, IRREDUCIBLE, MAX_EXPONENT};
use spectra_core::prg::{all_seeds, default_wise, marginals_uniform, HashFamily, KWiseBitGenerator, MzGenerator};
use spectra_core::spectral::{bentkus_d3_bound_check, fd_spectral_oracle, spectral_d1, spectral_d2, ProductFunction};
use spectra_core::{check_regularity, PositiveSpectrahedron, Sign, SpectrahedronPair, SymMatrix};

use crate::args::*;
use crate::output::{open_output, Config, CsvReport};
use crate::{row, Validation};

macro_rules! ensure_valid {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Validation(format!($($msg)+)).into());
        }
    };
}

fn load(path: &Path) -> Result<PositiveSpectrahedron<f64>> {
    let file = read_instance_file(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(file.to_spectrahedron()?)
}

/// Declared `τ` when present, measured otherwise.
fn effective_tau(s: &PositiveSpectrahedron<f64>) -> Result<f64> {
    Ok(match s.declared() {
        Some(d) => d.tau,
        None => check_regularity(s)?.tau_actual,
    })
}

fn estimator_header(extra: &[&'static str]) -> Vec<&'static str> {
    let mut h = vec!["experiment"];
    h.extend_from_slice(extra);
    h.extend_from_slice(&["estimate", "radius", "n_samples", "seed"]);
    h
}

use std::io::Write;

pub fn gen_instance(a: &GenInstance) -> Result<()> {
    let seed = derive_seed(a.common.seed, "gen-instance");
    let mut s = random_regular_instance(a.n, a.k, a.tau, a.m_width, a.gamma, seed)?;
    if a.sign == SignArg::Nsd {
        s = s.negate_coeffs();
    }
    match &a.common.output {
        Some(p) => write_instance(p, &s)?,
        None => {
            let mut out = open_output(None)?;
            writeln!(out, "{}", spectra_core::instance::to_json(&s)?)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn parse_points(path: &Path, n: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Validation(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        ensure_valid!(p.len() == n, "{}:{}: expected {n} coordinates, got {}", path.display(), lineno + 1, p.len());
        points.push(p);
    }
    Ok(points)
}

pub fn eval(a: &Eval) -> Result<()> {
    let s = load(&a.instance)?;
    let mut cfg = Config::new("eval");
    cfg.set("instance", a.instance.display()).set("seed", a.common.seed);
    let points = match &a.points {
        Some(p) => {
            cfg.set("points", p.display());
            parse_points(p, s.n())?
        }
        None => {
            ensure_valid!(a.samples > 0, "--samples must be positive");
            cfg.set("samples", a.samples).set("source", format!("{:?}", a.source).to_lowercase());
            let mut rng = chunk_rng(derive_seed(a.common.seed, "eval/points"), 0);
            (0..a.samples)
                .map(|_| {
                    (0..s.n())
                        .map(|_| match a.source {
                            SourceArg::Uniform => {
                                if rand_bit(&mut rng) {
                                    -1.0
                                } else {
                                    1.0
                                }
                            }
                            SourceArg::Gaussian => standard_normal(&mut rng),
                        })
                        .collect()
                })
                .collect()
        }
    };
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &["point", "lambda_max", "member", "seed"])?;
    for (i, x) in points.iter().enumerate() {
        let lm = s.lambda_max_at(x)?;
        out.row(&row![i, lm, (lm <= 0.0) as u8, a.common.seed])?;
    }
    out.finish()
}

fn rand_bit(rng: &mut impl RngCore) -> bool {
    rng.next_u32() & 1 == 1
}

pub fn regularity(a: &Regularity) -> Result<()> {
    let s = load(&a.instance)?;
    let r = check_regularity(&s)?;
    let mut cfg = Config::new("regularity");
    cfg.set("instance", a.instance.display()).set("seed", a.common.seed);
    let header = [
        "n",
        "k",
        "sign",
        "tau_actual",
        "lambda_min_sum",
        "lambda_max_sum",
        "gamma_actual",
        "declared_tau",
        "declared_M",
        "declared_gamma",
        "pass",
        "seed",
    ];
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    let (dt, dm, dg) = match s.declared() {
        Some(d) => (d.tau.to_string(), d.m_width.to_string(), d.gamma.to_string()),
        None => Default::default(),
    };
    let sign = if s.sign() == Sign::Psd { "PSD" } else { "NSD" };
    out.row(&row![
        s.n(),
        s.k(),
        sign,
        r.tau_actual,
        r.lambda_min_sum,
        r.lambda_max_sum,
        r.gamma_actual,
        dt,
        dm,
        dg,
        r.pass as u8,
        a.common.seed
    ])?;
    out.finish()
}

pub fn fool(a: &Fool) -> Result<()> {
    let s = load(&a.instance)?;
    let tau = match a.tau {
        Some(t) => {
            ensure_valid!(t > 0.0 && t.is_finite(), "--tau must be positive, got {t}");
            t
        }
        None => effective_tau(&s)?,
    };
    let wise = a.wise.unwrap_or_else(|| default_wise(s.k()));
    ensure_valid!(wise >= 1, "--wise must be at least 1");
    ensure_valid!(a.cap_seeds >= 1, "--cap-seeds must be positive");
    let truth = if a.samples == 0 {
        ensure_valid!(s.n() <= MAX_EXACT_VARS, "exact truth side needs n <= {MAX_EXACT_VARS}, got {}", s.n());
        TruthSide::Exact
    } else {
        TruthSide::Uniform
    };
    let gen = MzGenerator::for_instance(s.n(), s.k(), tau, Some(wise))?;
    let mut cfg = Config::new("fool");
    cfg.set("instance", a.instance.display())
        .set("tau", tau)
        .set("buckets", gen.t_pow2())
        .set("wise", wise)
        .set("cap_seeds", a.cap_seeds)
        .set("samples", a.samples)
        .set("seed", a.common.seed);
    let ecfg = EstimatorConfig::new(a.samples.max(1), a.common.seed);
    let r = fooling_error(&s, &gen, a.cap_seeds, truth, &ecfg)?;
    let header =
        estimator_header(&["n", "k", "buckets", "wise", "seed_bits", "truth", "exhaustive", "p_truth", "p_prg"]);
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    out.row(&row![
        "fool",
        s.n(),
        s.k(),
        gen.t_pow2(),
        wise,
        gen.seed_length(),
        r.metadata["truth"],
        r.metadata["exhaustive"],
        r.metadata["p_truth"],
        r.metadata["p_prg"],
        r.estimate,
        r.radius,
        r.n_samples,
        r.seed
    ])?;
    out.finish()
}

/// Block that never has `λ_max` in `(−Λ, Λ]` for `Λ < reach`, and always accepts.
fn vacuous(n: usize, k: usize, sign: Sign, reach: f64) -> Result<PositiveSpectrahedron<f64>> {
    Ok(PositiveSpectrahedron::new(vec![SymMatrix::zeros(k); n], SymMatrix::scaled_identity(k, reach), sign)?)
}

fn real_source(s: SourceArg) -> RealSource {
    match s {
        SourceArg::Uniform => RealSource::Uniform,
        SourceArg::Gaussian => RealSource::Gaussian,
    }
}

pub fn anticonc(a: &Anticonc) -> Result<()> {
    ensure_valid!(a.samples > 0, "--samples must be positive");
    ensure_valid!(!a.lambda.is_empty(), "--Lambda needs at least one value");
    for &l in &a.lambda {
        ensure_valid!(l > 0.0 && l.is_finite(), "Lambda must be positive, got {l}");
    }
    let first = load(&a.instance)?;
    let reach = a.lambda.iter().copied().fold(1.0, f64::max) * 2.0;
    let second = match &a.instance2 {
        Some(p) => load(p)?,
        None => vacuous(first.n(), first.k(), first.sign().flip(), reach)?,
    };
    let pair = match first.sign() {
        Sign::Psd => SpectrahedronPair::new(first, second)?,
        Sign::Nsd => SpectrahedronPair::new(second, first)?,
    };
    // the vacuous partner has τ = 0, so the max is the real block's τ
    let tau = effective_tau(pair.psd())?.max(effective_tau(pair.nsd())?);
    let threshold = 20.0 * tau * (pair.psd().k() as f64).log2();
    let mut cfg = Config::new("anticonc");
    cfg.set("instance", a.instance.display());
    if let Some(p) = &a.instance2 {
        cfg.set("instance2", p.display());
    }
    cfg.list("Lambda", &a.lambda)
        .set("source", format!("{:?}", a.source).to_lowercase())
        .set("samples", a.samples)
        .set("seed", a.common.seed)
        .set("regime_threshold", threshold);
    let curve = anti_concentration_curve(
        &pair,
        &a.lambda,
        real_source(a.source),
        &EstimatorConfig::new(a.samples, a.common.seed),
    )?;
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &estimator_header(&["Lambda", "in_regime"]))?;
    for (r, &l) in curve.iter().zip(&a.lambda) {
        out.row(&row!["anticonc", l, (l >= threshold) as u8, r.estimate, r.radius, r.n_samples, r.seed])?;
    }
    out.finish()
}

pub fn ns(a: &Ns) -> Result<()> {
    ensure_valid!(a.samples > 0, "--samples must be positive");
    ensure_valid!(!a.epsilon.is_empty(), "--epsilon needs at least one value");
    for &e in &a.epsilon {
        ensure_valid!(e > 0.0 && e <= 0.5, "epsilon must lie in (0, 1/2], got {e}");
    }
    let s = load(&a.instance)?;
    let mut cfg = Config::new("ns");
    cfg.set("instance", a.instance.display())
        .list("epsilon", &a.epsilon)
        .set("samples", a.samples)
        .set("seed", a.common.seed);
    let curve = noise_sensitivity_curve(&s, &a.epsilon, &EstimatorConfig::new(a.samples, a.common.seed))?;
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &estimator_header(&["epsilon"]))?;
    for (r, &e) in curve.iter().zip(&a.epsilon) {
        out.row(&row!["ns", e, r.estimate, r.radius, r.n_samples, r.seed])?;
    }
    out.finish()
}

pub fn avg_sens(a: &AvgSens) -> Result<()> {
    ensure_valid!(a.samples > 0, "--samples must be positive");
    let s = load(&a.instance)?;
    let mut cfg = Config::new("as");
    cfg.set("instance", a.instance.display()).set("samples", a.samples).set("seed", a.common.seed);
    let r = average_sensitivity(&s, &EstimatorConfig::new(a.samples, a.common.seed))?;
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &estimator_header(&["n"]))?;
    out.row(&row!["as", s.n(), r.estimate, r.radius, r.n_samples, r.seed])?;
    out.finish()
}

pub fn buckets(a: &Buckets) -> Result<()> {
    ensure_valid!(a.trials > 0, "--trials must be positive");
    let s = load(&a.instance)?;
    let tau = effective_tau(&s)?;
    let m = a.m.unwrap_or_else(|| recommended_buckets(tau, s.k()));
    ensure_valid!(m >= 1, "--m must be at least 1");
    let mut cfg = Config::new("buckets");
    cfg.set("instance", a.instance.display())
        .set("m", m)
        .set("tau", tau)
        .set("trials", a.trials)
        .set("seed", a.common.seed);
    let r = bucket_goodness(&s, m, a.trials, &EstimatorConfig::new(1, a.common.seed))?;
    let header = estimator_header(&["m", "tau", "threshold", "mean_good_fraction", "lemma_bound"]);
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    out.row(&row![
        "buckets",
        m,
        tau,
        r.metadata["threshold"],
        r.metadata["mean_good_fraction"],
        r.metadata["lemma_bound"],
        r.estimate,
        r.radius,
        r.n_samples,
        r.seed
    ])?;
    out.finish()
}

pub fn factcheck(a: &Factcheck) -> Result<()> {
    ensure_valid!(a.samples > 0, "--samples must be positive");
    ensure_valid!(a.n >= 1 && a.k >= 2, "need n >= 1 and k >= 2");
    for &m in &a.moments {
        ensure_valid!(m >= 2 && m % 2 == 0, "moments must be even and at least 2, got {m}");
    }
    for &p in &a.p {
        ensure_valid!(p >= 1, "p must be at least 1");
    }
    for &d in &a.delta {
        ensure_valid!(d > 0.0 && d < 1.0, "delta must lie in (0, 1), got {d}");
    }
    let mut cfg = Config::new("factcheck");
    cfg.set("n", a.n)
        .set("k", a.k)
        .set("samples", a.samples)
        .list("moments", &a.moments)
        .list("p", &a.p)
        .list("delta", &a.delta)
        .set("seed", a.common.seed);
    let family = random_fact_family(a.n, a.k, derive_seed(a.common.seed, "factcheck/family"))?;
    let checks =
        matrix_fact_checks(&family, &a.moments, &a.p, &a.delta, &EstimatorConfig::new(a.samples, a.common.seed))?;
    let header = ["fact", "variant", "param", "lhs", "rhs", "radius", "n_samples", "pass", "seed"];
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    for c in checks {
        out.row(&row![c.fact, c.variant, c.param, c.lhs, c.rhs, c.radius, c.n_samples, c.pass as u8, a.common.seed])?;
    }
    out.finish()
}

fn gaussian_sym(rng: &mut impl RngCore, k: usize, scale: f64) -> SymMatrix<f64> {
    let mut m = SymMatrix::zeros(k);
    for i in 0..k {
        for j in i..k {
            let s = if i == j { scale } else { scale / std::f64::consts::SQRT_2 };
            m.set_sym(i, j, s * standard_normal(rng));
        }
    }
    m
}

pub fn deriv_check(a: &DerivCheck) -> Result<()> {
    ensure_valid!(a.k >= 1, "--k must be positive");
    ensure_valid!(a.trials >= 1, "--trials must be positive");
    ensure_valid!(a.theta > 0.0 && a.theta.is_finite(), "--theta must be positive");
    ensure_valid!(a.alpha.is_finite(), "--alpha must be finite");
    let mut cfg = Config::new("deriv-check");
    cfg.set("order", a.order)
        .set("k", a.k)
        .set("trials", a.trials)
        .set("theta", a.theta)
        .set("alpha", a.alpha)
        .set("seed", a.common.seed);
    let header = ["trial", "order", "analytic", "fd", "rel_error", "bound", "bound_ratio", "pass", "seed"];
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    let f = ProductFunction::bentkus_theta(a.theta, a.alpha)?;
    let base = derive_seed(a.common.seed, "deriv-check");
    for trial in 0..a.trials {
        let mut rng = chunk_rng(base, trial as u64);
        let x = gaussian_sym(&mut rng, a.k, 1.0 / (a.k as f64).sqrt());
        let h = gaussian_sym(&mut rng, a.k, 1.0);
        let h = h.scale(1.0 / h.spectral_norm()?.max(f64::MIN_POSITIVE));
        let psi = |m: &SymMatrix<f64>| spectra_core::mollifier::psi_theta(&m.shift(a.alpha), a.theta);
        let fields = match a.order {
            1 | 2 => {
                let analytic = if a.order == 1 { spectral_d1(&f, &x, &h)? } else { spectral_d2(&f, &x, &h, &h)? };
                let fd = fd_spectral_oracle(&psi, &x, &h, a.order as usize, None)?.value;
                let rel = (analytic - fd).abs() / fd.abs().max(1.0);
                let tol = if a.order == 1 { 1e-6 } else { 1e-5 };
                row![trial, a.order, analytic, fd, rel, "", "", u8::from(rel <= tol), a.common.seed]
            }
            _ => {
                let r = bentkus_d3_bound_check(&x, &h, a.theta, a.alpha)?;
                let pass = r.rel_error <= 1e-4 && r.ratio <= 1.0;
                row![
                    trial,
                    3,
                    r.analytic_value,
                    r.fd_value,
                    r.rel_error,
                    r.bound_value,
                    r.ratio,
                    u8::from(pass),
                    a.common.seed
                ]
            }
        };
        out.row(&fields)?;
    }
    out.finish()
}

pub fn mollifier_check(a: &MollifierCheck) -> Result<()> {
    ensure_valid!(a.points >= 1, "--points must be positive");
    ensure_valid!(!a.theta.is_empty(), "--theta needs at least one value");
    let params: Vec<MollifierParams> =
        a.theta.iter().map(|&t| MollifierParams::new(a.k, t, a.delta)).collect::<spectra_core::Result<_>>()?;
    let mut cfg = Config::new("mollifier-check");
    cfg.set("k", a.k).list("theta", &a.theta).set("delta", a.delta).set("points", a.points).set("seed", a.common.seed);
    let header = [
        "theta",
        "alpha",
        "Lambda",
        "points",
        "inner",
        "band",
        "outer",
        "inner_rate",
        "outer_rate",
        "sandwich_rate",
        "all_ok",
        "seed",
    ];
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &header)?;
    for (ti, p) in params.iter().enumerate() {
        let mut rng = chunk_rng(derive_seed(a.common.seed, "mollifier-check"), ti as u64);
        let mut regions = [0usize; 3];
        let (mut inner_ok, mut outer_ok, mut both_ok, mut all_ok) = (0usize, 0usize, 0usize, 0usize);
        for _ in 0..a.points {
            // a top coordinate within ±3Λ, the rest below it
            let top = p.lambda * (6.0 * unit(&mut rng) - 3.0);
            let mut x: Vec<f64> = (0..a.k).map(|_| top - 2.0 * p.lambda * unit(&mut rng)).collect();
            let pick = (rng.next_u64() % a.k as u64) as usize;
            x[pick] = top;
            let r = sandwich_check(p, &x)?;
            regions[match r.region {
                Region::Inner => 0,
                Region::Band => 1,
                Region::Outer => 2,
            }] += 1;
            if r.region == Region::Inner && r.inner_ok {
                inner_ok += 1;
            }
            if r.region == Region::Outer && r.outer_ok {
                outer_ok += 1;
            }
            both_ok += (r.lower_ok && r.upper_ok) as usize;
            all_ok += r.all_ok() as usize;
        }
        let rate = |ok: usize, total: usize| {
            if total == 0 {
                1.0
            } else {
                ok as f64 / total as f64
            }
        };
        out.row(&row![
            p.theta,
            p.alpha,
            p.lambda,
            a.points,
            regions[0],
            regions[1],
            regions[2],
            rate(inner_ok, regions[0]),
            rate(outer_ok, regions[2]),
            rate(both_ok, a.points),
            (all_ok == a.points) as u8,
            a.common.seed
        ])?;
    }
    out.finish()
}

fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn prg_selftest(a: &PrgSelftest) -> Result<()> {
    ensure_valid!(a.wise >= 1 && a.hash_wise >= 1, "--wise and --hash-wise must be at least 1");
    ensure_valid!(
        (a.wise as u32).saturating_mul(a.a) <= 24,
        "bit generator seed space 2^(wise*a) too large to enumerate"
    );
    ensure_valid!(
        (a.hash_wise as u32).saturating_mul(a.hash_b) <= 24,
        "hash seed space 2^(hash_wise*hash_b) too large to enumerate"
    );
    let mut cfg = Config::new("prg-selftest");
    cfg.set("m", a.m)
        .set("wise", a.wise)
        .set("a", a.a)
        .set("hash_n", a.hash_n)
        .set("hash_t", a.hash_t)
        .set("hash_b", a.hash_b)
        .set("hash_wise", a.hash_wise)
        .set("seed", a.common.seed);
    let mut out = CsvReport::create(a.common.output.as_deref(), &cfg, &["test", "params", "seeds", "pass", "seed"])?;

    let gen = KWiseBitGenerator::new(a.m, a.wise, a.a)?;
    let rows: Vec<Vec<usize>> = all_seeds(a.wise, a.a)
        .map(|s| gen.bits(&s).map(|b| b.iter().map(|&v| (v < 0) as usize).collect::<Vec<usize>>()))
        .collect::<spectra_core::Result<_>>()?;
    let ok = marginals_uniform(&rows, a.m, a.wise, 2);
    out.row(&row!["bit-marginals", format!("m={} w={} a={}", a.m, a.wise, a.a), rows.len(), ok as u8, a.common.seed])?;

    let hash = HashFamily::new(a.hash_n, a.hash_t, a.hash_wise, a.hash_b)?;
    let rows: Vec<Vec<usize>> = all_seeds(a.hash_wise, a.hash_b)
        .map(|s| (0..a.hash_n).map(|i| hash.eval(&s, i)).collect::<spectra_core::Result<Vec<usize>>>())
        .collect::<spectra_core::Result<_>>()?;
    let ok = marginals_uniform(&rows, a.hash_n, a.hash_wise, a.hash_t);
    let params = format!("n={} t={} w={} b={}", a.hash_n, a.hash_t, a.hash_wise, a.hash_b);
    out.row(&row!["hash-marginals", params, rows.len(), ok as u8, a.common.seed])?;

    let ok = (1..=MAX_EXPONENT as usize).all(|e| is_irreducible(IRREDUCIBLE[e]));
    out.row(&row!["field-moduli", format!("exponents=1..{MAX_EXPONENT}"), 0, ok as u8, a.common.seed])?;
    out.finish()
}
