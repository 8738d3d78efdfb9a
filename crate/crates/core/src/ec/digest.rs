use sha2::{Digest as _, Sha256};

use crate::error::CryptoError;

/// Leftmost 128 bits of SHA-256, matching the bit length of the group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; 16]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    pub(crate) fn to_u128(self) -> u128 {
        u128::from_be_bytes(self.0)
    }
}

pub fn digest_uid(uid: &[u8]) -> Result<Digest, CryptoError> {
    if uid.is_empty() {
        return Err(CryptoError::EmptyUid);
    }
    let full = Sha256::digest(uid);
    let mut out = [0u8; 16];
    out.copy_from_slice(&full[..16]);
    Ok(Digest(out))
}
