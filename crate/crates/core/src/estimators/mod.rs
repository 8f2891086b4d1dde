//! Monte-Carlo and exhaustive estimators: acceptance probabilities, fooling
//! error, anti-concentration, noise and average sensitivity, random
//! bucketing, and checks of matrix concentration facts.
//!
//! Every estimator is deterministic in its [`EstimatorConfig`], independent of
//! the rayon worker count.

mod accept;
mod anticonc;
mod buckets;
mod engine;
mod facts;
mod fit;
mod sensitivity;

pub use accept::{
    accept_prob, calibrate_offset, exact_accept_count, fooling_error, lambda_max_samples, Source, TruthSide,
    MAX_EXACT_VARS,
};
pub use anticonc::{anti_concentration, anti_concentration_curve, RealSource};
pub use buckets::{bucket_goodness, bucket_split, recommended_buckets, BucketSplit};
pub use engine::{
    chunk_rng, chunked_sums, derive_seed, hoeffding_radius, mc_means, signs_from_index, uniform_signs, EstimatorConfig,
    EstimatorReport, Neumaier, DEFAULT_CHUNK, DEFAULT_CONFIDENCE,
};
pub use facts::{
    chernoff_check, chernoff_rhs, matrix_fact_checks, moment_bound_checks, moment_rhs, random_fact_family,
    rosenthal_check, rosenthal_lhs_exact, rosenthal_rhs, FactCheck, FactFamily,
};
pub use fit::{linear_fit, loglog_fit, LinearFit};
pub use sensitivity::{average_sensitivity, noise_sensitivity, noise_sensitivity_curve};
