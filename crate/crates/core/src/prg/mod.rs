//! Exactly `w`-wise uniform bit generators, `w`-wise uniform hashing, and their
//! hash-then-bucket composition.

pub mod gf2;
pub mod hash;
pub mod kwise;
pub mod mz;
pub mod seeds;

pub use gf2::{gf2a_eval_poly, Gf2a};
pub use hash::HashFamily;
pub use kwise::{all_seeds, marginals_uniform, KWiseBitGenerator};
pub use mz::{buckets_for_tau, default_wise, MzGenerator, SeedTuple};
pub use seeds::{enumerate_or_sample_seeds, SeedSource};
