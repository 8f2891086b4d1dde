//! `w`-wise uniform hash functions `[n] → [t]` for `t` a power of two.

use super::gf2::Gf2a;
use super::kwise::min_exponent;
use crate::error::{Error, Result};

/// `h(i)` is the top `log₂ t` bits of `p(i)` for a random polynomial `p` of
/// degree `< w` over GF(2^b). Buckets are numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashFamily {
    n: usize,
    t_pow2: usize,
    w: usize,
    field: Gf2a,
    shift: u32,
}

impl HashFamily {
    pub fn new(n: usize, t_pow2: usize, w: usize, b: u32) -> Result<Self> {
        let field = Gf2a::new(b)?;
        if n == 0 || w == 0 {
            return Err(Error::Input("hash family needs n >= 1 and w >= 1".into()));
        }
        if !t_pow2.is_power_of_two() {
            return Err(Error::Input(format!("range size {t_pow2} is not a power of two")));
        }
        let log_t = t_pow2.trailing_zeros();
        if log_t > b {
            return Err(Error::Input(format!("GF(2^{b}) cannot index {t_pow2} buckets")));
        }
        if (n as u64) > field.order() {
            return Err(Error::Input(format!("GF(2^{b}) has fewer than n = {n} points")));
        }
        Ok(Self { n, t_pow2, w, field, shift: b - log_t })
    }

    /// Family over the smallest field that has `n` points and `t` output values.
    pub fn for_domain(n: usize, t_pow2: usize, w: usize) -> Result<Self> {
        let log_t = t_pow2.max(1).trailing_zeros();
        Self::new(n, t_pow2, w, min_exponent(n).max(log_t))
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

    pub fn b(&self) -> u32 {
        self.field.exponent()
    }

    pub fn seed_bits(&self) -> usize {
        self.w * self.b() as usize
    }

    pub fn check_seed(&self, seed: &[u32]) -> Result<()> {
        if seed.len() != self.w {
            return Err(Error::Seed(format!("expected {} hash coefficients, got {}", self.w, seed.len())));
        }
        if let Some(bad) = seed.iter().find(|&&c| !self.field.contains(c)) {
            return Err(Error::Seed(format!("{bad:#x} is not an element of GF(2^{})", self.b())));
        }
        Ok(())
    }

    #[inline]
    pub fn eval_unchecked(&self, seed: &[u32], i: usize) -> usize {
        if self.t_pow2 == 1 {
            return 0;
        }
        (self.field.eval_poly(seed, i as u32) >> self.shift) as usize
    }

    pub fn eval(&self, seed: &[u32], i: usize) -> Result<usize> {
        self.check_seed(seed)?;
        if i >= self.n {
            return Err(Error::Input(format!("hash index {i} out of range 0..{}", self.n)));
        }
        Ok(self.eval_unchecked(seed, i))
    }
}
