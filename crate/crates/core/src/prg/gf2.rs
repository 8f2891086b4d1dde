//! Arithmetic in GF(2^a) for `1 ≤ a ≤ 32`, elements stored as `u32` bit vectors.

use crate::error::{Error, Result};

/// Irreducible polynomial for each exponent, including the leading term.
/// Index 0 is unused.
pub const IRREDUCIBLE: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11b,
    0x203,
    0x409,
    0x805,
    0x1009,
    0x201b,
    0x4021,
    0x8003,
    0x1002b,
    0x20009,
    0x40009,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x100001b,
    0x2000009,
    0x400001b,
    0x8000027,
    0x10000003,
    0x20000005,
    0x40000003,
    0x80000009,
    0x10000008d,
];

pub const MAX_EXPONENT: u32 = 32;

/// The field GF(2^a) with a fixed modulus from [`IRREDUCIBLE`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gf2a {
    a: u32,
    modulus: u64,
}

impl Gf2a {
    pub fn new(a: u32) -> Result<Self> {
        if a == 0 || a > MAX_EXPONENT {
            return Err(Error::FieldExponent(a));
        }
        Ok(Self { a, modulus: IRREDUCIBLE[a as usize] })
    }

    #[inline]
    pub fn exponent(&self) -> u32 {
        self.a
    }

    /// Number of field elements, `2^a`.
    #[inline]
    pub fn order(&self) -> u64 {
        1u64 << self.a
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        (x as u64) < self.order()
    }

    /// Carry-less product reduced modulo the field polynomial.
    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let top = 1u64 << self.a;
        let mut acc = 0u64;
        let mut x = x as u64;
        let mut y = y;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x & top != 0 {
                x ^= self.modulus;
            }
        }
        acc as u32
    }

    /// Horner evaluation of `Σⱼ coeffs[j]·point^j`.
    #[inline]
    pub fn eval_poly(&self, coeffs: &[u32], point: u32) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| self.mul(acc, point) ^ c)
    }
}

/// Evaluates a polynomial over GF(2^a) at `point`.
pub fn gf2a_eval_poly(coeffs: &[u32], point: u32, a: u32) -> Result<u32> {
    let f = Gf2a::new(a)?;
    if let Some(&bad) = coeffs.iter().chain(std::iter::once(&point)).find(|&&c| !f.contains(c)) {
        return Err(Error::Input(format!("{bad:#x} is not an element of GF(2^{a})")));
    }
    Ok(f.eval_poly(coeffs, point))
}

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

/// Remainder of GF(2)[x] polynomial division.
pub fn poly_rem(mut p: u64, d: u64) -> u64 {
    assert!(d != 0, "division by the zero polynomial");
    let dd = degree(d);
    while p != 0 && degree(p) >= dd {
        p ^= d << (degree(p) - dd);
    }
    p
}

/// Irreducibility over GF(2) by trial division with every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u64) -> bool {
    let d = degree(p);
    if d < 1 {
        return false;
    }
    let half = d / 2;
    for q in 2u64..(1u64 << (half + 1)) {
        if poly_rem(p, q) == 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Schoolbook carry-less product followed by long-division reduction.
    fn slow_mul(x: u32, y: u32, a: u32) -> u32 {
        let mut prod = 0u64;
        for i in 0..32 {
            if (y >> i) & 1 == 1 {
                prod ^= (x as u64) << i;
            }
        }
        poly_rem(prod, IRREDUCIBLE[a as usize]) as u32
    }

    #[test]
    fn zero_and_constant_polynomials() {
        for a in [1, 4, 8, 32] {
            assert_eq!(gf2a_eval_poly(&[], 1, a).unwrap(), 0);
            assert_eq!(gf2a_eval_poly(&[0, 0, 0], 1, a).unwrap(), 0);
            assert_eq!(gf2a_eval_poly(&[1], 0, a).unwrap(), 1);
        }
    }

    #[test]
    fn square_below_reduction() {
        assert_eq!(gf2a_eval_poly(&[0, 0, 1], 0b0010, 4).unwrap(), 0b0100);
    }

    #[test]
    fn exponent_range() {
        assert!(matches!(Gf2a::new(0), Err(Error::FieldExponent(0))));
        assert!(matches!(Gf2a::new(33), Err(Error::FieldExponent(33))));
        assert!(gf2a_eval_poly(&[16], 1, 4).is_err());
    }

    #[test]
    fn mul_matches_schoolbook() {
        for a in 1..=8u32 {
            let f = Gf2a::new(a).unwrap();
            for x in 0..(1u32 << a) {
                for y in 0..(1u32 << a) {
                    assert_eq!(f.mul(x, y), slow_mul(x, y, a));
                }
            }
        }
        let f = Gf2a::new(32).unwrap();
        for (x, y) in [(0xdead_beef, 0x1234_5678), (u32::MAX, u32::MAX), (0x8000_0000, 2)] {
            assert_eq!(f.mul(x, y), slow_mul(x, y, 32));
        }
    }

    #[test]
    fn small_fields_have_inverses() {
        for a in 1..=10u32 {
            let f = Gf2a::new(a).unwrap();
            for x in 1..(1u32 << a) {
                assert!((1..(1u32 << a)).any(|y| f.mul(x, y) == 1), "a={a} x={x}");
            }
        }
    }

    #[test]
    fn table_is_irreducible() {
        for (a, &p) in IRREDUCIBLE.iter().enumerate().skip(1) {
            assert_eq!(degree(p), a as i32);
            assert!(is_irreducible(p), "a={a}");
        }
        assert!(!is_irreducible(0b101));
        assert!(!is_irreducible(0x11));
    }
}
