//! Arithmetic in the secp128r1 base field, p = 2^128 - 2^97 - 1.
//!
//! Elements are kept fully reduced in a single `u128`. Products are formed as
//! 256-bit values from 64-bit limbs and folded back with the identity
//! 2^128 ≡ 2^97 + 1 (mod p).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// The field prime.
pub const P: u128 = 0xFFFF_FFFD_FFFF_FFFF_FFFF_FFFF_FFFF_FFFF;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElement(u128);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Returns `None` unless `value < p`.
    pub fn new(value: u128) -> Option<Self> {
        (value < P).then_some(FieldElement(value))
    }

    pub(crate) const fn from_raw(value: u128) -> Self {
        FieldElement(value)
    }

    /// Reduces an arbitrary 128-bit integer into the field.
    pub fn reduce(value: u128) -> Self {
        FieldElement(if value >= P { value - P } else { value })
    }

    pub fn value(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn double(self) -> Self {
        self + self
    }

    pub fn pow(self, mut exp: u128) -> Self {
        let mut base = self;
        let mut acc = FieldElement::ONE;
        while exp != 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; the inverse of zero is reported as zero.
    pub fn invert(self) -> Self {
        self.pow(P - 2)
    }

    pub fn to_be_bytes(self) -> [u8; 16] {
        self.0.to_be_bytes()
    }

    pub fn from_be_bytes(bytes: [u8; 16]) -> Option<Self> {
        Self::new(u128::from_be_bytes(bytes))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fp({:#034x})", self.0)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (sum, carry) = self.0.overflowing_add(rhs.0);
        if carry || sum >= P {
            FieldElement(sum.wrapping_sub(P))
        } else {
            FieldElement(sum)
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        if self.0 >= rhs.0 {
            FieldElement(self.0 - rhs.0)
        } else {
            FieldElement(P - (rhs.0 - self.0))
        }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement::ZERO - self
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (hi, lo) = widening_mul(self.0, rhs.0);
        FieldElement(reduce_wide(hi, lo))
    }
}

/// Full 128x128 -> 256 bit product as (high, low).
pub(crate) fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);

    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;

    // middle column, at most 3 * (2^64 - 1), so track the carry explicitly
    let (mid, mid_carry) = lh.overflowing_add(hl);
    let (lo, lo_carry) = ll.overflowing_add(mid << 64);
    let hi = hh + (mid >> 64) + ((mid_carry as u128) << 64) + lo_carry as u128;
    (hi, lo)
}

fn reduce_wide(mut hi: u128, mut lo: u128) -> u128 {
    // hi*2^128 + lo ≡ hi*2^97 + hi + lo
    while hi != 0 {
        let h = hi;
        let (s1, c1) = lo.overflowing_add(h);
        let (s2, c2) = s1.overflowing_add(h << 97);
        hi = (h >> 31) + c1 as u128 + c2 as u128;
        lo = s2;
    }
    while lo >= P {
        lo -= P;
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widening_mul_matches_small_products() {
        assert_eq!(widening_mul(3, 5), (0, 15));
        assert_eq!(widening_mul(u128::MAX, 2), (1, u128::MAX - 1));
        assert_eq!(widening_mul(u128::MAX, u128::MAX), (u128::MAX - 1, 1));
    }

    #[test]
    fn reduction_wraps_at_prime() {
        assert_eq!(FieldElement::reduce(P), FieldElement::ZERO);
        assert_eq!(FieldElement::new(P), None);
        let minus_one = FieldElement::new(P - 1).unwrap();
        assert_eq!(minus_one * minus_one, FieldElement::ONE);
        assert_eq!(minus_one + FieldElement::ONE, FieldElement::ZERO);
        assert_eq!(FieldElement::ZERO - FieldElement::ONE, minus_one);
    }

    #[test]
    fn inverse_roundtrip() {
        for v in [1u128, 2, 3, 0xdead_beef, P - 2, P >> 1] {
            let x = FieldElement::new(v).unwrap();
            assert_eq!(x * x.invert(), FieldElement::ONE, "v = {v:#x}");
        }
    }

    #[test]
    fn two_pow_128_folds() {
        // 2^127 * 2 = 2^128 ≡ 2^97 + 1
        let t = FieldElement::new(1 << 127).unwrap() * FieldElement::new(2).unwrap();
        assert_eq!(t.value(), (1u128 << 97) + 1);
    }
}
