#![allow(dead_code)]

use nfc_bms::ec::{CurvePoint, FieldElement, KeyPair};
use nfc_bms::system::SystemBlueprint;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn key(seed: u64) -> KeyPair {
    KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn blueprint(seed: u64, tags: usize) -> SystemBlueprint {
    SystemBlueprint::provisioned(&key(seed), tags)
}

/// Textbook affine secp128r1 arithmetic over arbitrary-precision integers.
/// Shares nothing with the library's field or point code.
pub mod oracle {
    use super::*;

    fn big(hex: &str) -> BigUint {
        BigUint::parse_bytes(hex.as_bytes(), 16).unwrap()
    }

    pub fn p() -> BigUint {
        big("FFFFFFFDFFFFFFFFFFFFFFFFFFFFFFFF")
    }
    pub fn a() -> BigUint {
        big("FFFFFFFDFFFFFFFFFFFFFFFFFFFFFFFC")
    }
    pub fn b() -> BigUint {
        big("E87579C11079F43DD824993C2CEE5ED3")
    }
    pub fn n() -> BigUint {
        big("FFFFFFFE0000000075A30D1B9038A115")
    }
    pub fn g() -> Option<(BigUint, BigUint)> {
        Some((
            big("161FF7528B899B2D0C28607CA52C5B86"),
            big("CF5AC8395BAFEB13C02DA292DDED7A83"),
        ))
    }

    fn inv(x: &BigUint) -> BigUint {
        let p = p();
        x.modpow(&(&p - 2u32), &p)
    }

    fn sub(x: &BigUint, y: &BigUint) -> BigUint {
        let p = p();
        ((x % &p) + &p - (y % &p)) % &p
    }

    pub type Pt = Option<(BigUint, BigUint)>;

    pub fn add(p1: &Pt, p2: &Pt) -> Pt {
        let p = p();
        match (p1, p2) {
            (None, q) | (q, None) => q.clone(),
            (Some((x1, y1)), Some((x2, y2))) => {
                if x1 == x2 && ((y1 + y2) % &p).is_zero() {
                    return None;
                }
                let lambda = if x1 == x2 {
                    let num = (BigUint::from(3u32) * x1 * x1 + a()) % &p;
                    num * inv(&(BigUint::from(2u32) * y1 % &p)) % &p
                } else {
                    sub(y2, y1) * inv(&sub(x2, x1)) % &p
                };
                let x3 = sub(&sub(&(&lambda * &lambda % &p), x1), x2);
                let y3 = sub(&(lambda * sub(x1, &x3) % &p), y1);
                Some((x3, y3))
            }
        }
    }

    pub fn mul(k: &BigUint, pt: &Pt) -> Pt {
        let mut acc: Pt = None;
        let mut base = pt.clone();
        let mut k = k.clone();
        while !k.is_zero() {
            if (&k & BigUint::one()) == BigUint::one() {
                acc = add(&acc, &base);
            }
            base = add(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn on_curve(pt: &Pt) -> bool {
        match pt {
            None => true,
            Some((x, y)) => {
                let p = p();
                (y * y) % &p == (x * x * x + a() * x + b()) % &p
            }
        }
    }

    pub fn from_lib(pt: &CurvePoint) -> Pt {
        match pt {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, y } => {
                Some((BigUint::from(x.value()), BigUint::from(y.value())))
            }
        }
    }

    pub fn to_lib(pt: &Pt) -> CurvePoint {
        match pt {
            None => CurvePoint::Infinity,
            Some((x, y)) => {
                let fx = FieldElement::new(to_u128(x)).unwrap();
                let fy = FieldElement::new(to_u128(y)).unwrap();
                CurvePoint::from_affine(fx, fy).unwrap()
            }
        }
    }

    pub fn to_u128(v: &BigUint) -> u128 {
        let bytes = v.to_bytes_be();
        let mut buf = [0u8; 16];
        buf[16 - bytes.len()..].copy_from_slice(&bytes);
        u128::from_be_bytes(buf)
    }
}
