//! Tag provisioning and the reader-side authentication check.
//!
//! The verifier consults the allowlist before touching any cryptography.
//! Every call leaves an audit trail so that ordering can be checked from the
//! outside.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ec::{
    digest_uid, ecdsa_sign, ecdsa_verify, CurvePoint, EcdsaSignature, KeyPair, Scalar,
};
use crate::error::{CryptoError, Error};

pub const UID_LEN: usize = 8;
pub const UID_PREFIX: u8 = 0xE0;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagUid([u8; UID_LEN]);

impl TagUid {
    pub fn new(bytes: [u8; UID_LEN]) -> Result<Self, Error> {
        if bytes[0] != UID_PREFIX {
            return Err(Error::InvalidUid(format!(
                "first byte must be 0xE0, got {:#04x}",
                bytes[0]
            )));
        }
        Ok(TagUid(bytes))
    }

    /// Builds a UID from the 7 manufacturer-assigned bytes.
    pub fn from_serial(serial: [u8; UID_LEN - 1]) -> Self {
        let mut bytes = [UID_PREFIX; UID_LEN];
        bytes[1..].copy_from_slice(&serial);
        TagUid(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; UID_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode_upper(self.0)
    }
}

impl FromStr for TagUid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 2 * UID_LEN {
            return Err(Error::InvalidUid(format!(
                "expected 16 hex characters starting with E0, got {:?}",
                s
            )));
        }
        let raw = hex::decode(s).map_err(|e| Error::InvalidUid(format!("{s:?}: {e}")))?;
        let mut bytes = [0u8; UID_LEN];
        bytes.copy_from_slice(&raw);
        TagUid::new(bytes)
    }
}

impl fmt::Display for TagUid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for TagUid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TagUid({})", self.to_hex())
    }
}

impl Serialize for TagUid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for TagUid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The 32-byte r || s value held in the tag's protected memory.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OriginalitySignature(pub [u8; 32]);

impl OriginalitySignature {
    pub fn decode(&self) -> Result<EcdsaSignature, CryptoError> {
        EcdsaSignature::from_bytes(&self.0)
    }

    pub fn to_hex(&self) -> String {
        hex::encode_upper(self.0)
    }
}

impl From<EcdsaSignature> for OriginalitySignature {
    fn from(sig: EcdsaSignature) -> Self {
        OriginalitySignature(sig.to_bytes())
    }
}

impl FromStr for OriginalitySignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = hex::decode(s).map_err(|e| Error::Hex {
            field: "signature".into(),
            reason: e.to_string(),
        })?;
        let bytes: [u8; 32] = raw.try_into().map_err(|v: Vec<u8>| Error::Hex {
            field: "signature".into(),
            reason: format!("expected 32 bytes, got {}", v.len()),
        })?;
        Ok(OriginalitySignature(bytes))
    }
}

impl fmt::Debug for OriginalitySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OriginalitySignature({})", self.to_hex())
    }
}

impl Serialize for OriginalitySignature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for OriginalitySignature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Factory step: sign the UID digest and return what gets burned into the tag.
pub fn provision_tag(key: &KeyPair, uid: &TagUid) -> OriginalitySignature {
    let digest = digest_uid(uid.as_bytes()).expect("UID is never empty");
    ecdsa_sign(key, &digest).into()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AllowList {
    entries: BTreeSet<TagUid>,
}

impl AllowList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, uid: TagUid) -> bool {
        self.entries.insert(uid)
    }

    pub fn contains(&self, uid: &TagUid) -> bool {
        self.entries.contains(uid)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TagUid> {
        self.entries.iter()
    }
}

impl FromIterator<TagUid> for AllowList {
    fn from_iter<I: IntoIterator<Item = TagUid>>(iter: I) -> Self {
        AllowList {
            entries: iter.into_iter().collect(),
        }
    }
}

pub fn check_uid(list: &AllowList, uid: &TagUid) -> bool {
    list.contains(uid)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierConfig {
    public_key: CurvePoint,
    allowlist: AllowList,
}

impl VerifierConfig {
    pub fn new(public_key: CurvePoint, allowlist: AllowList) -> Result<Self, CryptoError> {
        if public_key.is_infinity() {
            return Err(CryptoError::InfinityPublicKey);
        }
        if !public_key.is_on_curve() {
            return Err(CryptoError::NotOnCurve);
        }
        Ok(VerifierConfig {
            public_key,
            allowlist,
        })
    }

    pub fn public_key(&self) -> &CurvePoint {
        &self.public_key
    }

    pub fn allowlist(&self) -> &AllowList {
        &self.allowlist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuthVerdict {
    Accepted,
    RejectedUnknownUid,
    RejectedBadSignature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum AuditEvent {
    UidCheck { passed: bool },
    SignatureDecode { ok: bool },
    VerifyCall,
    Outcome { verdict: AuthVerdict },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthOutcome {
    pub verdict: AuthVerdict,
    pub elapsed_ms: f64,
    pub audit: Vec<AuditEvent>,
}

impl AuthOutcome {
    pub fn is_accepted(&self) -> bool {
        self.verdict == AuthVerdict::Accepted
    }

    pub fn verify_calls(&self) -> usize {
        self.audit
            .iter()
            .filter(|e| matches!(e, AuditEvent::VerifyCall))
            .count()
    }
}

/// The signature check behind [`authenticate`]. Swappable so tests can
/// observe exactly when it runs.
pub trait SignatureVerifier {
    fn verify(&mut self, public: &CurvePoint, uid: &TagUid, sig: &EcdsaSignature) -> bool;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct EcdsaVerifier;

impl SignatureVerifier for EcdsaVerifier {
    fn verify(&mut self, public: &CurvePoint, uid: &TagUid, sig: &EcdsaSignature) -> bool {
        let Ok(digest) = digest_uid(uid.as_bytes()) else {
            return false;
        };
        // VerifierConfig guarantees a finite public key
        ecdsa_verify(public, &digest, sig).unwrap_or(false)
    }
}

pub fn authenticate(cfg: &VerifierConfig, uid: &TagUid, sig: &OriginalitySignature) -> AuthOutcome {
    authenticate_with(cfg, uid, sig, &mut EcdsaVerifier)
}

pub fn authenticate_with<V: SignatureVerifier>(
    cfg: &VerifierConfig,
    uid: &TagUid,
    sig: &OriginalitySignature,
    verifier: &mut V,
) -> AuthOutcome {
    let mut audit = Vec::with_capacity(4);
    let finish = |verdict, mut audit: Vec<AuditEvent>| {
        audit.push(AuditEvent::Outcome { verdict });
        AuthOutcome {
            verdict,
            elapsed_ms: 0.0,
            audit,
        }
    };

    let known = check_uid(&cfg.allowlist, uid);
    audit.push(AuditEvent::UidCheck { passed: known });
    if !known {
        return finish(AuthVerdict::RejectedUnknownUid, audit);
    }

    let decoded = sig.decode();
    audit.push(AuditEvent::SignatureDecode {
        ok: decoded.is_ok(),
    });
    let Ok(decoded) = decoded else {
        return finish(AuthVerdict::RejectedBadSignature, audit);
    };

    audit.push(AuditEvent::VerifyCall);
    if verifier.verify(&cfg.public_key, uid, &decoded) {
        finish(AuthVerdict::Accepted, audit)
    } else {
        finish(AuthVerdict::RejectedBadSignature, audit)
    }
}

/// On-disk key material: hex private scalar and uncompressed public point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub private: String,
    pub public: String,
}

impl KeyFile {
    pub fn from_keypair(key: &KeyPair) -> Self {
        KeyFile {
            private: hex::encode_upper(key.private().to_be_bytes()),
            public: hex::encode_upper(key.public().to_bytes()),
        }
    }

    pub fn public_key(&self) -> Result<CurvePoint, Error> {
        let raw = hex::decode(&self.public).map_err(|e| Error::Hex {
            field: "public".into(),
            reason: e.to_string(),
        })?;
        Ok(CurvePoint::from_bytes(&raw)?)
    }

    /// Loads the pair and checks that the public half matches the private one.
    pub fn keypair(&self) -> Result<KeyPair, Error> {
        let raw = hex::decode(&self.private).map_err(|e| Error::Hex {
            field: "private".into(),
            reason: e.to_string(),
        })?;
        let bytes: [u8; 16] = raw.try_into().map_err(|_| Error::Hex {
            field: "private".into(),
            reason: "expected 16 bytes".into(),
        })?;
        let scalar = Scalar::from_be_bytes(bytes).ok_or(CryptoError::BadEncoding)?;
        let pair = KeyPair::from_private(scalar)?;
        if pair.public() != self.public_key()? {
            return Err(Error::Config(
                "key file public point does not match private scalar".into(),
            ));
        }
        Ok(pair)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uid(last: u8) -> TagUid {
        TagUid::from_serial([0x04, 0x01, 0x02, 0x03, 0x04, 0x05, last])
    }

    fn setup() -> (KeyPair, VerifierConfig) {
        let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(1));
        let cfg =
            VerifierConfig::new(key.public(), [uid(6), uid(7)].into_iter().collect()).unwrap();
        (key, cfg)
    }

    #[test]
    fn uid_parsing() {
        assert_eq!("E004010203040506".parse::<TagUid>().unwrap(), uid(6));
        assert_eq!("e004010203040506".parse::<TagUid>().unwrap(), uid(6));
        assert!("XYZ".parse::<TagUid>().is_err());
        assert!("D004010203040506".parse::<TagUid>().is_err());
        assert!("E00401020304050G".parse::<TagUid>().is_err());
    }

    #[test]
    fn check_uid_cases() {
        let list: AllowList = [uid(1)].into_iter().collect();
        assert!(check_uid(&list, &uid(1)));
        assert!(!check_uid(&list, &uid(2)));
        assert!(!check_uid(&AllowList::new(), &uid(1)));
    }

    #[test]
    fn provision_roundtrip() {
        let (key, cfg) = setup();
        let sig = provision_tag(&key, &uid(6));
        let out = authenticate(&cfg, &uid(6), &sig);
        assert_eq!(out.verdict, AuthVerdict::Accepted);
        assert_eq!(out.verify_calls(), 1);

        let decoded = sig.decode().unwrap();
        assert!(decoded.r.value() >= 1 && decoded.s.value() >= 1);
        assert_ne!(sig, provision_tag(&key, &uid(7)));
    }

    #[test]
    fn unknown_uid_with_valid_signature_is_rejected_first() {
        let (key, cfg) = setup();
        let stranger = uid(9);
        let sig = provision_tag(&key, &stranger);
        let out = authenticate(&cfg, &stranger, &sig);
        assert_eq!(out.verdict, AuthVerdict::RejectedUnknownUid);
        assert_eq!(
            out.audit,
            vec![
                AuditEvent::UidCheck { passed: false },
                AuditEvent::Outcome {
                    verdict: AuthVerdict::RejectedUnknownUid
                }
            ]
        );
    }

    #[test]
    fn foreign_key_signature_is_rejected() {
        let (_, cfg) = setup();
        let other = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(2));
        let sig = provision_tag(&other, &uid(6));
        assert_eq!(
            authenticate(&cfg, &uid(6), &sig).verdict,
            AuthVerdict::RejectedBadSignature
        );
    }

    #[test]
    fn malformed_signature_is_a_rejection_not_a_crash() {
        let (_, cfg) = setup();
        let out = authenticate(&cfg, &uid(6), &OriginalitySignature([0xFF; 32]));
        assert_eq!(out.verdict, AuthVerdict::RejectedBadSignature);
        assert_eq!(out.verify_calls(), 0);
    }

    #[test]
    fn key_file_roundtrip() {
        let (key, _) = setup();
        let file = KeyFile::from_keypair(&key);
        assert_eq!(file.keypair().unwrap(), key);
        assert_eq!(file.public.len(), 66);
    }

    #[test]
    fn infinity_key_rejected() {
        assert_eq!(
            VerifierConfig::new(CurvePoint::Infinity, AllowList::new()),
            Err(CryptoError::InfinityPublicKey)
        );
    }
}
