//! Integers modulo the secp128r1 group order `n`.

use std::fmt;
use std::ops::{Add, Mul, Neg};

/// Order of the base point.
pub const N: u128 = 0xFFFF_FFFE_0000_0000_75A3_0D1B_9038_A115;

/// A value in `[0, n)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(u128);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    pub fn new(value: u128) -> Option<Self> {
        (value < N).then_some(Scalar(value))
    }

    /// Reduces any 128-bit integer modulo `n`. Since n > 2^127 a single
    /// subtraction suffices.
    pub fn reduce(value: u128) -> Self {
        Scalar(if value >= N { value - N } else { value })
    }

    pub fn value(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Inverse modulo the (prime) order; zero maps to zero.
    pub fn invert(self) -> Self {
        let mut exp = N - 2;
        let mut base = self;
        let mut acc = Scalar::ONE;
        while exp != 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    pub fn to_be_bytes(self) -> [u8; 16] {
        self.0.to_be_bytes()
    }

    pub fn from_be_bytes(bytes: [u8; 16]) -> Option<Self> {
        Self::new(u128::from_be_bytes(bytes))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({:#034x})", self.0)
    }
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (sum, carry) = a.overflowing_add(b);
    if carry || sum >= m {
        sum.wrapping_sub(m)
    } else {
        sum
    }
}

// Shift-and-add; only a handful of these run per signature.
fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let mut acc = 0u128;
    for bit in (0..128).rev() {
        acc = add_mod(acc, acc, m);
        if (b >> bit) & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
    }
    acc
}

impl Add for Scalar {
    type Output = Scalar;

    fn add(self, rhs: Self) -> Self {
        Scalar(add_mod(self.0, rhs.0, N))
    }
}

impl Mul for Scalar {
    type Output = Scalar;

    fn mul(self, rhs: Self) -> Self {
        Scalar(mul_mod(self.0, rhs.0, N))
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Scalar(N - self.0)
        }
    }
}
