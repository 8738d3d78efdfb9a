//! secp128r1 field, group and ECDSA arithmetic.
//!
//! Nothing here is constant-time; it exists to drive the simulator.

pub mod curve;
pub mod digest;
pub mod ecdsa;
pub mod field;
pub mod point;
pub mod scalar;

pub use curve::{generator, secp128r1, CurveParams};
pub use digest::{digest_uid, Digest};
pub use ecdsa::{ecdsa_sign, ecdsa_verify, EcdsaSignature, KeyPair};
pub use field::FieldElement;
pub use point::{point_add, scalar_mul, CurvePoint};
pub use scalar::Scalar;
