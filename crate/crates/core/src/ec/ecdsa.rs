//! ECDSA over secp128r1 with deterministic nonces.
//!
//! Nonces follow the HMAC-SHA256 generator of RFC 6979 §3.2, specialised to
//! a 128-bit order and a 128-bit digest.

use hmac::{Hmac, Mac};
use rand::{CryptoRng, RngCore};
use sha2::Sha256;

use super::curve::generator;
use super::digest::Digest;
use super::point::{double_scalar_mul, scalar_mul, CurvePoint};
use super::scalar::{Scalar, N};
use crate::error::CryptoError;

type HmacSha256 = Hmac<Sha256>;

pub const SIGNATURE_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPair {
    private: Scalar,
    public: CurvePoint,
}

impl KeyPair {
    pub fn from_private(private: Scalar) -> Result<Self, CryptoError> {
        if private.is_zero() {
            return Err(CryptoError::ZeroPrivateKey);
        }
        Ok(KeyPair {
            private,
            public: scalar_mul(private.value(), &generator()),
        })
    }

    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let mut buf = [0u8; 16];
            rng.fill_bytes(&mut buf);
            if let Some(k) = Scalar::from_be_bytes(buf) {
                if let Ok(pair) = KeyPair::from_private(k) {
                    return pair;
                }
            }
        }
    }

    pub fn private(&self) -> Scalar {
        self.private
    }

    pub fn public(&self) -> CurvePoint {
        self.public
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EcdsaSignature {
    pub r: Scalar,
    pub s: Scalar,
}

impl EcdsaSignature {
    /// Raw r || s, both big-endian.
    pub fn to_bytes(&self) -> [u8; SIGNATURE_LEN] {
        let mut out = [0u8; SIGNATURE_LEN];
        out[..16].copy_from_slice(&self.r.to_be_bytes());
        out[16..].copy_from_slice(&self.s.to_be_bytes());
        out
    }

    /// Fails if either half is zero or not below `n`.
    pub fn from_bytes(bytes: &[u8; SIGNATURE_LEN]) -> Result<Self, CryptoError> {
        let mut rb = [0u8; 16];
        let mut sb = [0u8; 16];
        rb.copy_from_slice(&bytes[..16]);
        sb.copy_from_slice(&bytes[16..]);
        let r = Scalar::from_be_bytes(rb).ok_or(CryptoError::SignatureOutOfRange)?;
        let s = Scalar::from_be_bytes(sb).ok_or(CryptoError::SignatureOutOfRange)?;
        if r.is_zero() || s.is_zero() {
            return Err(CryptoError::SignatureOutOfRange);
        }
        Ok(EcdsaSignature { r, s })
    }
}

/// Deterministic nonce stream for one (key, digest) pair.
struct NonceGenerator {
    k: [u8; 32],
    v: [u8; 32],
    first: bool,
}

impl NonceGenerator {
    fn new(private: Scalar, digest: &Digest) -> Self {
        let x = private.to_be_bytes();
        let h = Scalar::reduce(digest.to_u128()).to_be_bytes();
        let mut k = [0u8; 32];
        let mut v = [1u8; 32];
        k = hmac(&k, &[&v, &[0x00], &x, &h]);
        v = hmac(&k, &[&v]);
        k = hmac(&k, &[&v, &[0x01], &x, &h]);
        v = hmac(&k, &[&v]);
        NonceGenerator { k, v, first: true }
    }

    fn next_nonce(&mut self) -> Scalar {
        loop {
            if !self.first {
                self.k = hmac(&self.k, &[&self.v, &[0x00]]);
                self.v = hmac(&self.k, &[&self.v]);
            }
            self.first = false;
            self.v = hmac(&self.k, &[&self.v]);
            let mut t = [0u8; 16];
            t.copy_from_slice(&self.v[..16]);
            let candidate = u128::from_be_bytes(t);
            if candidate != 0 && candidate < N {
                return Scalar::reduce(candidate);
            }
        }
    }
}

fn hmac(key: &[u8; 32], parts: &[&[u8]]) -> [u8; 32] {
    let mut mac = HmacSha256::new_from_slice(key).expect("HMAC accepts any key length");
    for part in parts {
        mac.update(part);
    }
    mac.finalize().into_bytes().into()
}

pub fn ecdsa_sign(key: &KeyPair, digest: &Digest) -> EcdsaSignature {
    let mut nonces = NonceGenerator::new(key.private, digest);
    // r or s of zero has probability ~2^-127; the loop is bounded in practice
    for _ in 0..64 {
        if let Some(sig) = sign_with_nonce(key, digest, nonces.next_nonce()) {
            return sig;
        }
    }
    unreachable!("64 consecutive degenerate nonces")
}

/// Signs with a caller-supplied nonce. Returns `None` if r or s is zero.
#[doc(hidden)]
pub fn sign_with_nonce(key: &KeyPair, digest: &Digest, k: Scalar) -> Option<EcdsaSignature> {
    if k.is_zero() {
        return None;
    }
    let r_point = scalar_mul(k.value(), &generator());
    let r = Scalar::reduce(r_point.x()?.value());
    if r.is_zero() {
        return None;
    }
    let e = Scalar::reduce(digest.to_u128());
    let s = k.invert() * (e + r * key.private);
    if s.is_zero() {
        return None;
    }
    Some(EcdsaSignature { r, s })
}

pub fn ecdsa_verify(
    public: &CurvePoint,
    digest: &Digest,
    sig: &EcdsaSignature,
) -> Result<bool, CryptoError> {
    if public.is_infinity() {
        return Err(CryptoError::InfinityPublicKey);
    }
    if sig.r.is_zero() || sig.s.is_zero() || sig.r.value() >= N || sig.s.value() >= N {
        return Ok(false);
    }
    let e = Scalar::reduce(digest.to_u128());
    let w = sig.s.invert();
    let u1 = e * w;
    let u2 = sig.r * w;
    let point = double_scalar_mul(u1.value(), &generator(), u2.value(), public);
    Ok(match point.x() {
        None => false,
        Some(x) => Scalar::reduce(x.value()) == sig.r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::digest::digest_uid;

    const UID: [u8; 8] = [0xE0, 0x04, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06];
    const PRIV: u128 = 0x0123_4567_89AB_CDEF_0123_4567_89AB_CDEF;

    fn key() -> KeyPair {
        KeyPair::from_private(Scalar::new(PRIV).unwrap()).unwrap()
    }

    #[test]
    fn public_key_vector() {
        let q = key().public();
        assert_eq!(q.x().unwrap().value(), 0x1bb9273d32cfcd5bb09750dd50af91b3);
        assert_eq!(q.y().unwrap().value(), 0xcbc8ec11842eca82183475b8454441a5);
    }

    #[test]
    fn deterministic_signature_vector() {
        // computed with an independent Python HMAC-DRBG + affine-arithmetic reference
        let sig = ecdsa_sign(&key(), &digest_uid(&UID).unwrap());
        assert_eq!(sig.r.value(), 0x5d1eea773f002a2edc1e4973b558d402);
        assert_eq!(sig.s.value(), 0x2ae134968584d0f6291570b3467e793b);
        assert_eq!(sig, ecdsa_sign(&key(), &digest_uid(&UID).unwrap()));
    }

    #[test]
    fn forced_unit_nonce_gives_generator_x() {
        let d = digest_uid(&UID).unwrap();
        let sig = sign_with_nonce(&key(), &d, Scalar::ONE).unwrap();
        assert_eq!(sig.r.value(), 0x161ff7528b899b2d0c28607ca52c5b86);
        assert_eq!(sig.s.value(), 0x8fcdfdfe2cf2dc008e54fffe680d2b8e);
        assert!(ecdsa_verify(&key().public(), &d, &sig).unwrap());
    }

    #[test]
    fn verify_rejects_tampering_and_range() {
        let d = digest_uid(&UID).unwrap();
        let pk = key().public();
        let sig = ecdsa_sign(&key(), &d);
        assert!(ecdsa_verify(&pk, &d, &sig).unwrap());

        let mut bytes = sig.to_bytes();
        bytes[31] ^= 0x01;
        let flipped = EcdsaSignature::from_bytes(&bytes).unwrap();
        assert!(!ecdsa_verify(&pk, &d, &flipped).unwrap());

        let zero_r = EcdsaSignature {
            r: Scalar::ZERO,
            s: sig.s,
        };
        assert!(!ecdsa_verify(&pk, &d, &zero_r).unwrap());
        assert_eq!(
            ecdsa_verify(&CurvePoint::Infinity, &d, &sig),
            Err(CryptoError::InfinityPublicKey)
        );
    }

    #[test]
    fn signature_decoding_range() {
        assert_eq!(
            EcdsaSignature::from_bytes(&[0u8; 32]),
            Err(CryptoError::SignatureOutOfRange)
        );
        assert_eq!(
            EcdsaSignature::from_bytes(&[0xFF; 32]),
            Err(CryptoError::SignatureOutOfRange)
        );
        let sig = ecdsa_sign(&key(), &digest_uid(&UID).unwrap());
        assert_eq!(EcdsaSignature::from_bytes(&sig.to_bytes()).unwrap(), sig);
    }

    #[test]
    fn zero_private_key_rejected() {
        assert_eq!(
            KeyPair::from_private(Scalar::ZERO),
            Err(CryptoError::ZeroPrivateKey)
        );
    }
}
