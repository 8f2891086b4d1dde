//! Exactly `w`-wise uniform sign vectors from random polynomials over GF(2^a).

use super::gf2::Gf2a;
use crate::error::{Error, Result};

/// Smallest `a ≥ 1` with `2^a ≥ m`.
pub fn min_exponent(m: usize) -> u32 {
    let mut a = 1;
    while (1u64 << a) < m as u64 {
        a += 1;
    }
    a
}

/// Output bit `i` is the least-significant bit of `p(i)` for a random polynomial
/// `p` of degree `< w` over GF(2^a), mapped `0 → +1`, `1 → −1`.
///
/// Evaluations of a uniformly random degree-`(w−1)` polynomial at distinct points
/// are `w`-wise independent and uniform over the field, so any `w` output bits are
/// exactly uniform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KWiseBitGenerator {
    m: usize,
    w: usize,
    field: Gf2a,
}

impl KWiseBitGenerator {
    pub fn new(m: usize, w: usize, a: u32) -> Result<Self> {
        let field = Gf2a::new(a)?;
        if m == 0 || w == 0 {
            return Err(Error::Input("bit generator needs m >= 1 and w >= 1".into()));
        }
        if (m as u64) > field.order() {
            return Err(Error::Input(format!("GF(2^{a}) has fewer than m = {m} points")));
        }
        Ok(Self { m, w, field })
    }

    /// Generator over the smallest field with at least `m` points.
    pub fn for_length(m: usize, w: usize) -> Result<Self> {
        Self::new(m, w, min_exponent(m))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn a(&self) -> u32 {
        self.field.exponent()
    }

    pub fn field(&self) -> Gf2a {
        self.field
    }

    pub fn seed_bits(&self) -> usize {
        self.w * self.a() as usize
    }

    pub fn check_seed(&self, seed: &[u32]) -> Result<()> {
        if seed.len() != self.w {
            return Err(Error::Seed(format!("expected {} field elements, got {}", self.w, seed.len())));
        }
        if let Some(bad) = seed.iter().find(|&&c| !self.field.contains(c)) {
            return Err(Error::Seed(format!("{bad:#x} is not an element of GF(2^{})", self.a())));
        }
        Ok(())
    }

    /// Bit `i` without seed validation.
    #[inline]
    pub fn bit_unchecked(&self, seed: &[u32], i: usize) -> i8 {
        if self.field.eval_poly(seed, i as u32) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn bit(&self, seed: &[u32], i: usize) -> Result<i8> {
        self.check_seed(seed)?;
        if i >= self.m {
            return Err(Error::Input(format!("bit index {i} out of range 0..{}", self.m)));
        }
        Ok(self.bit_unchecked(seed, i))
    }

    pub fn bits(&self, seed: &[u32]) -> Result<Vec<i8>> {
        self.check_seed(seed)?;
        Ok((0..self.m).map(|i| self.bit_unchecked(seed, i)).collect())
    }
}

/// All `2^(w·a)` seeds in lexicographic order, first coefficient most significant.
pub fn all_seeds(w: usize, a: u32) -> impl Iterator<Item = Vec<u32>> {
    let total_bits = w as u32 * a;
    assert!(total_bits < 64, "seed space too large to enumerate");
    let mask = (1u64 << a) - 1;
    (0..(1u64 << total_bits))
        .map(move |idx| (0..w).map(|j| ((idx >> (a as usize * (w - 1 - j))) & mask) as u32).collect())
}

/// Every marginal on at most `w` positions of the rows is exactly uniform.
pub fn marginals_uniform(rows: &[Vec<usize>], len: usize, w: usize, alphabet: usize) -> bool {
    let total = rows.len();
    let mut subset = Vec::new();
    fn rec(
        rows: &[Vec<usize>],
        len: usize,
        w: usize,
        alphabet: usize,
        total: usize,
        start: usize,
        subset: &mut Vec<usize>,
    ) -> bool {
        if !subset.is_empty() {
            let cells = alphabet.pow(subset.len() as u32);
            if !total.is_multiple_of(cells) {
                return false;
            }
            let mut counts = vec![0usize; cells];
            for r in rows {
                let cell = subset.iter().fold(0, |acc, &p| acc * alphabet + r[p]);
                counts[cell] += 1;
            }
            if counts.iter().any(|&c| c != total / cells) {
                return false;
            }
        }
        if subset.len() == w {
            return true;
        }
        for p in start..len {
            subset.push(p);
            let ok = rec(rows, len, w, alphabet, total, p + 1, subset);
            subset.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    rec(rows, len, w, alphabet, total, 0, &mut subset)
}
