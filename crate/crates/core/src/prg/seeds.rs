//! Exhaustive or sampled seed streams for a generator.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mz::{MzGenerator, SeedTuple};

/// Randomly indexable list of seeds: all `2^r` seeds when `2^r ≤ cap`,
/// otherwise `cap` uniform seeds drawn from `rng_seed`.
#[derive(Clone, Debug)]
pub struct SeedSource {
    gen: MzGenerator,
    len: u64,
    exhaustive: bool,
    rng_seed: u64,
}

impl SeedSource {
    pub fn new(gen: &MzGenerator, cap: u64, rng_seed: u64) -> Self {
        let cap = cap.max(1);
        let r = gen.seed_length();
        let exhaustive = r < 64 && (1u64 << r) <= cap;
        let len = if exhaustive { 1u64 << r } else { cap };
        Self { gen: *gen, len, exhaustive, rng_seed }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn generator(&self) -> &MzGenerator {
        &self.gen
    }

    /// Writes seed number `index` into `seed`.
    pub fn fill(&self, index: u64, seed: &mut SeedTuple) {
        assert!(index < self.len, "seed index out of range");
        if self.exhaustive {
            self.gen.seed_from_index(index, seed);
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(index);
        seed.0.clear();
        for e in 0..self.gen.n_elements() {
            let bits = self.gen.element_bits(e);
            let v = rng.next_u32();
            seed.0.push(if bits >= 32 { v } else { v & ((1u32 << bits) - 1) });
        }
    }

    pub fn get(&self, index: u64) -> SeedTuple {
        let mut seed = SeedTuple(Vec::new());
        self.fill(index, &mut seed);
        seed
    }

    pub fn iter(&self) -> impl Iterator<Item = SeedTuple> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Yields every seed once in lexicographic order if `2^r ≤ cap`, otherwise
/// `cap` random seeds reproducible from `rng_seed`.
pub fn enumerate_or_sample_seeds(gen: &MzGenerator, cap: u64, rng_seed: u64) -> impl Iterator<Item = SeedTuple> {
    let src = SeedSource::new(gen, cap, rng_seed);
    (0..src.len()).map(move |i| src.get(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn exhaustive_branch_is_complete() {
        // n = 4, t = 2, w = 2: b = a = 2 so r = 4 + 2·4 = 12.
        let g = MzGenerator::new(4, 2, 2).unwrap();
        assert_eq!(g.seed_length(), 12);
        let seeds: Vec<_> = enumerate_or_sample_seeds(&g, 1 << 20, 0).collect();
        assert_eq!(seeds.len(), 4096);
        assert_eq!(seeds.iter().collect::<HashSet<_>>().len(), 4096);
        assert!(seeds.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn eight_bit_space() {
        let g = MzGenerator::new(2, 2, 2).unwrap();
        assert_eq!(g.seed_length(), 6);
        let g = MzGenerator::new(4, 1, 2).unwrap();
        assert_eq!(g.seed_length(), 8);
        let seeds: HashSet<_> = enumerate_or_sample_seeds(&g, 1_000_000, 0).collect();
        assert_eq!(seeds.len(), 256);
    }

    #[test]
    fn sampled_branch_is_reproducible() {
        let g = MzGenerator::new(16, 4, 2).unwrap();
        assert_eq!(g.seed_length(), 40);
        let a: Vec<_> = enumerate_or_sample_seeds(&g, 1000, 9).collect();
        let b: Vec<_> = enumerate_or_sample_seeds(&g, 1000, 9).collect();
        let c: Vec<_> = enumerate_or_sample_seeds(&g, 1000, 10).collect();
        assert_eq!(a.len(), 1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|s| g.check_seed(s).is_ok()));
    }
}
