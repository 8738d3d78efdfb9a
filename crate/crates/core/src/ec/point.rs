//! Points on secp128r1: affine values in the public API, Jacobian
//! coordinates internally for the ladder.

use super::curve::{A, B};
use super::field::FieldElement;
use crate::error::CryptoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

/// Uncompressed encoding length: 0x04 || x || y.
pub const ENCODED_LEN: usize = 33;

impl CurvePoint {
    /// Builds an affine point, rejecting coordinates off the curve.
    pub fn from_affine(x: FieldElement, y: FieldElement) -> Result<Self, CryptoError> {
        let pt = CurvePoint::Affine { x, y };
        if pt.is_on_curve() {
            Ok(pt)
        } else {
            Err(CryptoError::NotOnCurve)
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<FieldElement> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(*x),
        }
    }

    pub fn y(&self) -> Option<FieldElement> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(*y),
        }
    }

    /// y² = x³ + ax + b. Infinity counts as on the curve.
    pub fn is_on_curve(&self) -> bool {
        match *self {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let a = FieldElement::from_raw(A);
                let b = FieldElement::from_raw(B);
                y.square() == x.square() * x + a * x + b
            }
        }
    }

    pub fn negate(&self) -> Self {
        match *self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x, y: -y },
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            CurvePoint::Infinity => vec![0x00],
            CurvePoint::Affine { x, y } => {
                let mut out = Vec::with_capacity(ENCODED_LEN);
                out.push(0x04);
                out.extend_from_slice(&x.to_be_bytes());
                out.extend_from_slice(&y.to_be_bytes());
                out
            }
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        match bytes {
            [0x00] => Ok(CurvePoint::Infinity),
            [0x04, rest @ ..] if rest.len() == 32 => {
                let mut xb = [0u8; 16];
                let mut yb = [0u8; 16];
                xb.copy_from_slice(&rest[..16]);
                yb.copy_from_slice(&rest[16..]);
                let x = FieldElement::from_be_bytes(xb).ok_or(CryptoError::BadEncoding)?;
                let y = FieldElement::from_be_bytes(yb).ok_or(CryptoError::BadEncoding)?;
                CurvePoint::from_affine(x, y)
            }
            _ => Err(CryptoError::BadEncoding),
        }
    }
}

/// Group addition.
pub fn point_add(p1: &CurvePoint, p2: &CurvePoint) -> CurvePoint {
    Jacobian::from(*p1).add(&Jacobian::from(*p2)).to_affine()
}

/// k·pt by left-to-right double-and-add.
pub fn scalar_mul(k: u128, pt: &CurvePoint) -> CurvePoint {
    let base = Jacobian::from(*pt);
    let mut acc = Jacobian::INFINITY;
    if k == 0 || pt.is_infinity() {
        return CurvePoint::Infinity;
    }
    let top = 127 - k.leading_zeros();
    for bit in (0..=top).rev() {
        acc = acc.double();
        if (k >> bit) & 1 == 1 {
            acc = acc.add(&base);
        }
    }
    acc.to_affine()
}

/// u1·G + u2·Q with a shared doubling chain (Shamir's trick).
pub(crate) fn double_scalar_mul(u1: u128, p: &CurvePoint, u2: u128, q: &CurvePoint) -> CurvePoint {
    let jp = Jacobian::from(*p);
    let jq = Jacobian::from(*q);
    let jpq = jp.add(&jq);
    let mut acc = Jacobian::INFINITY;
    for bit in (0..128).rev() {
        acc = acc.double();
        match ((u1 >> bit) & 1, (u2 >> bit) & 1) {
            (1, 1) => acc = acc.add(&jpq),
            (1, 0) => acc = acc.add(&jp),
            (0, 1) => acc = acc.add(&jq),
            _ => {}
        }
    }
    acc.to_affine()
}

/// (X, Y, Z) with x = X/Z², y = Y/Z³; Z = 0 is the point at infinity.
#[derive(Debug, Clone, Copy)]
struct Jacobian {
    x: FieldElement,
    y: FieldElement,
    z: FieldElement,
}

impl From<CurvePoint> for Jacobian {
    fn from(pt: CurvePoint) -> Self {
        match pt {
            CurvePoint::Infinity => Jacobian::INFINITY,
            CurvePoint::Affine { x, y } => Jacobian {
                x,
                y,
                z: FieldElement::ONE,
            },
        }
    }
}

impl Jacobian {
    const INFINITY: Jacobian = Jacobian {
        x: FieldElement::ONE,
        y: FieldElement::ONE,
        z: FieldElement::ZERO,
    };

    fn is_infinity(&self) -> bool {
        self.z.is_zero()
    }

    fn to_affine(self) -> CurvePoint {
        if self.is_infinity() {
            return CurvePoint::Infinity;
        }
        let z_inv = self.z.invert();
        let z_inv2 = z_inv.square();
        CurvePoint::Affine {
            x: self.x * z_inv2,
            y: self.y * z_inv2 * z_inv,
        }
    }

    // dbl-2001-b, valid for a = -3
    fn double(&self) -> Self {
        if self.is_infinity() || self.y.is_zero() {
            return Jacobian::INFINITY;
        }
        let delta = self.z.square();
        let gamma = self.y.square();
        let beta = self.x * gamma;
        let t = (self.x - delta) * (self.x + delta);
        let alpha = t.double() + t;
        let beta4 = beta.double().double();
        let x3 = alpha.square() - beta4.double();
        let z3 = (self.y + self.z).square() - gamma - delta;
        let gamma_sq8 = gamma.square().double().double().double();
        let y3 = alpha * (beta4 - x3) - gamma_sq8;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    // add-2007-bl
    fn add(&self, other: &Self) -> Self {
        if self.is_infinity() {
            return *other;
        }
        if other.is_infinity() {
            return *self;
        }
        let z1z1 = self.z.square();
        let z2z2 = other.z.square();
        let u1 = self.x * z2z2;
        let u2 = other.x * z1z1;
        let s1 = self.y * other.z * z2z2;
        let s2 = other.y * self.z * z1z1;
        let h = u2 - u1;
        let r = s2 - s1;
        if h.is_zero() {
            return if r.is_zero() {
                self.double()
            } else {
                Jacobian::INFINITY
            };
        }
        let hh = h.square();
        let hhh = h * hh;
        let v = u1 * hh;
        let x3 = r.square() - hhh - v.double();
        let y3 = r * (v - x3) - s1 * hhh;
        let z3 = self.z * other.z * h;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }
}
