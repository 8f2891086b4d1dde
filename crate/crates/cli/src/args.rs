use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "spectra", version, about = "Experiments on regular positive spectrahedra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random (tau, M)-regular instance as JSON.
    GenInstance(GenInstance),
    /// Evaluate lambda_max and membership at a point set.
    Eval(Eval),
    /// Measure tau, the spectrum of the sum of squares, and ||B||.
    Regularity(Regularity),
    /// Fooling error of the bucketed generator against the uniform cube.
    Fool(Fool),
    /// Probability that a block's lambda_max lands in (-Lambda, Lambda].
    Anticonc(Anticonc),
    /// Noise sensitivity over a grid of epsilon.
    Ns(Ns),
    /// Average sensitivity.
    As(AvgSens),
    /// Fraction of random hashes with more than 3m/4 good buckets.
    Buckets(Buckets),
    /// Monte-Carlo checks of the matrix moment, Rosenthal and Chernoff bounds.
    Factcheck(Factcheck),
    /// Spectral derivatives of the Bentkus mollifier against finite differences.
    DerivCheck(DerivCheck),
    /// Clause pass rates of the mollifier sandwich.
    MollifierCheck(MollifierCheck),
    /// Exhaustive marginal checks of the bit generator and hash family.
    PrgSelftest(PrgSelftest),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed; every random stream is derived from it by label.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Psd,
    Nsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Uniform,
    Gaussian,
}

#[derive(Args, Debug)]
pub struct GenInstance {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub tau: f64,
    #[arg(long = "M")]
    pub m_width: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Psd)]
    pub sign: SignArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Eval {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated points, one per line; random points are drawn when absent.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Number of random points.
    #[arg(long, default_value_t = 16)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = SourceArg::Uniform)]
    pub source: SourceArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Regularity {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Fool {
    #[arg(long)]
    pub instance: PathBuf,
    /// Independence of the hash and block generators (default 80*ceil(log2 k)).
    #[arg(long)]
    pub wise: Option<usize>,
    /// Regularity used to size the buckets (default: declared, else measured).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Seed-space size above which seeds are sampled instead of enumerated.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap_seeds: u64,
    /// Uniform samples for the truth side; 0 enumerates the cube exactly.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Anticonc {
    /// PSD or NSD block.
    #[arg(long)]
    pub instance: PathBuf,
    /// Second block, of the opposite sign.
    #[arg(long)]
    pub instance2: Option<PathBuf>,
    #[arg(long = "Lambda", value_delimiter = ',', default_values_t = default_lambdas())]
    pub lambda: Vec<f64>,
    #[arg(long, value_enum, default_value_t = SourceArg::Uniform)]
    pub source: SourceArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

fn default_lambdas() -> Vec<f64> {
    (1..=10).map(|i| 0.05 * i as f64).collect()
}

#[derive(Args, Debug)]
pub struct Ns {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = (3..=9).map(|j| 0.5f64.powi(j)).collect::<Vec<_>>())]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct AvgSens {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Buckets {
    #[arg(long)]
    pub instance: PathBuf,
    /// Bucket count (default ceil(1/(10 tau^2 log2 k))).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Factcheck {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 5000)]
    pub samples: u64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 4, 6])]
    pub moments: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 2])]
    pub p: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25f64, 0.5])]
    pub delta: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DerivCheck {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub order: u8,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Shift alpha applied before the third derivative.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MollifierCheck {
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1f64, 0.5])]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct PrgSelftest {
    /// Bit generator: output length.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Bit generator: independence.
    #[arg(long, default_value_t = 3)]
    pub wise: usize,
    /// Bit generator: field exponent.
    #[arg(long, default_value_t = 4)]
    pub a: u32,
    /// Hash family: domain size.
    #[arg(long, default_value_t = 4)]
    pub hash_n: usize,
    /// Hash family: number of buckets (a power of two).
    #[arg(long, default_value_t = 2)]
    pub hash_t: usize,
    /// Hash family: field exponent.
    #[arg(long, default_value_t = 2)]
    pub hash_b: u32,
    /// Hash family: independence.
    #[arg(long, default_value_t = 2)]
    pub hash_wise: usize,
    #[command(flatten)]
    pub common: Common,
}
