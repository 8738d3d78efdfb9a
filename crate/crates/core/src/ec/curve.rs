//! secp128r1 domain parameters (SEC 2, version 1).

use super::field::{FieldElement, P};
use super::point::{scalar_mul, CurvePoint};
use super::scalar::N;

pub const A: u128 = 0xFFFF_FFFD_FFFF_FFFF_FFFF_FFFF_FFFF_FFFC;
pub const B: u128 = 0xE875_79C1_1079_F43D_D824_993C_2CEE_5ED3;
pub const GX: u128 = 0x161F_F752_8B89_9B2D_0C28_607C_A52C_5B86;
pub const GY: u128 = 0xCF5A_C839_5BAF_EB13_C02D_A292_DDED_7A83;
pub const COFACTOR: u32 = 1;

/// Curve parameters as a value, for callers that want them in one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveParams {
    pub p: u128,
    pub a: FieldElement,
    pub b: FieldElement,
    pub g: CurvePoint,
    pub n: u128,
    pub h: u32,
}

pub fn secp128r1() -> CurveParams {
    CurveParams {
        p: P,
        a: FieldElement::from_raw(A),
        b: FieldElement::from_raw(B),
        g: generator(),
        n: N,
        h: COFACTOR,
    }
}

pub fn generator() -> CurvePoint {
    CurvePoint::Affine {
        x: FieldElement::from_raw(GX),
        y: FieldElement::from_raw(GY),
    }
}

impl CurveParams {
    /// Startup self-check of the hard-coded constants.
    pub fn validate(&self) -> bool {
        let a = self.a;
        let b = self.b;
        let four = FieldElement::reduce(4);
        let twenty_seven = FieldElement::reduce(27);
        let discriminant = four * a * a * a + twenty_seven * b * b;
        a == -FieldElement::reduce(3)
            && !discriminant.is_zero()
            && self.g.is_on_curve()
            && scalar_mul(self.n, &self.g).is_infinity()
            && self.h == 1
    }
}
