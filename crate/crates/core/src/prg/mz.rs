//! The hash-then-bucket generator: coordinates are hashed into `t` buckets and
//! each bucket reads bits from its own `w`-wise uniform block generator.

use std::fmt::Write as _;

use super::hash::HashFamily;
use super::kwise::KWiseBitGenerator;
use crate::error::{Error, Result};

/// `⌈log₂ k⌉` (0 for `k ≤ 1`).
pub fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Default independence order `80·⌈log₂ k⌉`, at least 1.
pub fn default_wise(k: usize) -> usize {
    (80 * ceil_log2(k)).max(1)
}

/// `⌈1/τ⌉` rounded up to a power of two.
pub fn buckets_for_tau(tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Input(format!("tau must be positive and finite, got {tau}")));
    }
    let t = (1.0 / tau).ceil();
    if t > (1u64 << 31) as f64 {
        return Err(Error::Input(format!("tau = {tau} needs too many buckets")));
    }
    Ok((t as usize).max(1).next_power_of_two())
}

/// Field elements of a seed, flat: `w` hash coefficients, then `w` coefficients per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeedTuple(pub Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MzGenerator {
    n: usize,
    t_pow2: usize,
    w: usize,
    hash: HashFamily,
    block: KWiseBitGenerator,
}

impl MzGenerator {
    /// `t_pow2` buckets, independence order `w` for the hash and for each block.
    /// Every block generator can emit `n` bits, the worst-case bucket size.
    pub fn new(n: usize, t_pow2: usize, w: usize) -> Result<Self> {
        let hash = HashFamily::for_domain(n, t_pow2, w)?;
        let block = KWiseBitGenerator::for_length(n, w)?;
        Ok(Self { n, t_pow2, w, hash, block })
    }

    /// Generator for an `n`-variable, `k × k` instance with regularity `τ`;
    /// `wise` defaults to `80·⌈log₂ k⌉`.
    pub fn for_instance(n: usize, k: usize, tau: f64, wise: Option<usize>) -> Result<Self> {
        Self::new(n, buckets_for_tau(tau)?, wise.unwrap_or_else(|| default_wise(k)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_pow2(&self) -> usize {
        self.t_pow2
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn hash(&self) -> &HashFamily {
        &self.hash
    }

    pub fn block(&self) -> &KWiseBitGenerator {
        &self.block
    }

    /// Seed length `r` in bits.
    pub fn seed_length(&self) -> usize {
        self.hash.seed_bits() + self.t_pow2 * self.block.seed_bits()
    }

    pub fn n_elements(&self) -> usize {
        self.w * (1 + self.t_pow2)
    }

    /// Bit width of seed element `e`.
    #[inline]
    pub fn element_bits(&self, e: usize) -> u32 {
        if e < self.w {
            self.hash.b()
        } else {
            self.block.a()
        }
    }

    pub fn check_seed(&self, seed: &SeedTuple) -> Result<()> {
        if seed.0.len() != self.n_elements() {
            return Err(Error::Seed(format!("expected {} field elements, got {}", self.n_elements(), seed.0.len())));
        }
        self.hash.check_seed(&seed.0[..self.w])?;
        for blk in seed.0[self.w..].chunks(self.w) {
            self.block.check_seed(blk)?;
        }
        Ok(())
    }

    /// Writes the output for `seed` into `out`; `fill` is per-bucket scratch of length `t_pow2`.
    pub fn generate_into(&self, seed: &SeedTuple, out: &mut [i8], fill: &mut [usize]) {
        debug_assert_eq!(out.len(), self.n);
        debug_assert_eq!(fill.len(), self.t_pow2);
        fill.iter_mut().for_each(|c| *c = 0);
        let (hash_seed, blocks) = seed.0.split_at(self.w);
        for (j, o) in out.iter_mut().enumerate() {
            let b = self.hash.eval_unchecked(hash_seed, j);
            let pos = fill[b];
            fill[b] += 1;
            *o = self.block.bit_unchecked(&blocks[b * self.w..(b + 1) * self.w], pos);
        }
    }

    pub fn generate(&self, seed: &SeedTuple) -> Result<Vec<i8>> {
        self.check_seed(seed)?;
        let mut out = vec![0i8; self.n];
        let mut fill = vec![0usize; self.t_pow2];
        self.generate_into(seed, &mut out, &mut fill);
        Ok(out)
    }

    /// Decodes the `index`-th seed in lexicographic order (first element most significant).
    pub fn seed_from_index(&self, mut index: u64, seed: &mut SeedTuple) {
        seed.0.resize(self.n_elements(), 0);
        for e in (0..self.n_elements()).rev() {
            let bits = self.element_bits(e);
            seed.0[e] = (index & ((1u64 << bits) - 1)) as u32;
            index = if bits >= 64 { 0 } else { index >> bits };
        }
    }

    /// Hex string with `⌈bits/4⌉` digits per element, hash coefficients first.
    pub fn seed_to_hex(&self, seed: &SeedTuple) -> Result<String> {
        self.check_seed(seed)?;
        let mut s = String::new();
        for (e, &v) in seed.0.iter().enumerate() {
            let width = self.element_bits(e).div_ceil(4) as usize;
            write!(s, "{v:0width$x}").expect("write to String");
        }
        Ok(s)
    }

    pub fn seed_from_hex(&self, hex: &str) -> Result<SeedTuple> {
        let mut out = Vec::with_capacity(self.n_elements());
        let mut rest = hex;
        for e in 0..self.n_elements() {
            let width = self.element_bits(e).div_ceil(4) as usize;
            if rest.len() < width || !rest.is_char_boundary(width) {
                return Err(Error::Seed("hex seed too short".into()));
            }
            let (head, tail) = rest.split_at(width);
            out.push(u32::from_str_radix(head, 16).map_err(|e| Error::Seed(e.to_string()))?);
            rest = tail;
        }
        if !rest.is_empty() {
            return Err(Error::Seed("hex seed too long".into()));
        }
        let seed = SeedTuple(out);
        self.check_seed(&seed)?;
        Ok(seed)
    }
}
