use thiserror::Error;

use crate::link::LinkStatus;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("UID material must not be empty")]
    EmptyUid,
    #[error("point is not on secp128r1")]
    NotOnCurve,
    #[error("malformed point or scalar encoding")]
    BadEncoding,
    #[error("public key is the point at infinity")]
    InfinityPublicKey,
    #[error("private key must be nonzero")]
    ZeroPrivateKey,
    #[error("signature component outside [1, n-1]")]
    SignatureOutOfRange,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("invalid UID: {0}")]
    InvalidUid(String),
    #[error("invalid hex field `{field}`: {reason}")]
    Hex { field: String, reason: String },
    #[error("distance must be a finite non-negative number of cm, got {0}")]
    NegativeDistance(f64),
    #[error("link error: {0:?}")]
    Link(LinkStatus),
    #[error("temperature sensor read before initialization")]
    SensorUninitialized,
    #[error("no discovered tag with UID {0}")]
    NoTag(String),
    #[error("session for tag {0} is not initialized")]
    SessionNotReady(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
