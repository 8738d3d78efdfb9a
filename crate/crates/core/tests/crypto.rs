mod common;

use common::oracle;
use nfc_bms::ec::scalar::N;
use nfc_bms::ec::{
    digest_uid, ecdsa_sign, ecdsa_verify, generator, point_add, scalar_mul, CurvePoint, Digest,
    EcdsaSignature, KeyPair, Scalar,
};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn oracle_agrees_on_generator_multiples() {
    let g = oracle::g();
    assert!(oracle::on_curve(&g));
    assert_eq!(oracle::mul(&oracle::n(), &g), None);
    for k in [2u32, 3, 7, 1000, 65537] {
        let expect = oracle::mul(&BigUint::from(k), &g);
        assert_eq!(
            oracle::from_lib(&scalar_mul(k as u128, &generator())),
            expect,
            "k = {k}"
        );
    }
    // 2G frozen from an external reference as well
    let two_g = point_add(&generator(), &generator());
    assert_eq!(
        two_g.x().unwrap().value(),
        0x8151a0c6b92171db199db84be753a97e
    );
    assert_eq!(
        two_g.y().unwrap().value(),
        0x03d853559455caae838395a9275b7e95
    );
}

#[test]
fn order_properties() {
    let g = generator();
    assert!(scalar_mul(N, &g).is_infinity());
    assert_eq!(scalar_mul(N - 1, &g), g.negate());
}

#[test]
fn scalar_mul_matches_repeated_addition() {
    let g = generator();
    let mut acc = CurvePoint::Infinity;
    for k in 0..=16u128 {
        assert_eq!(scalar_mul(k, &g), acc, "k = {k}");
        acc = point_add(&acc, &g);
    }
}

fn point_strategy() -> impl Strategy<Value = CurvePoint> {
    (1u128..N).prop_map(|k| scalar_mul(k, &generator()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_laws(a in point_strategy(), b in point_strategy(), c in point_strategy()) {
        prop_assert_eq!(point_add(&a, &b), point_add(&b, &a));
        prop_assert_eq!(
            point_add(&point_add(&a, &b), &c),
            point_add(&a, &point_add(&b, &c))
        );
        prop_assert_eq!(point_add(&a, &CurvePoint::Infinity), a);
        prop_assert_eq!(point_add(&a, &a.negate()), CurvePoint::Infinity);
        let sum = point_add(&a, &b);
        prop_assert!(sum.is_on_curve());
        prop_assert!(point_add(&a, &a).is_on_curve());
    }

    #[test]
    fn addition_matches_oracle(a in point_strategy(), b in point_strategy()) {
        let expect = oracle::add(&oracle::from_lib(&a), &oracle::from_lib(&b));
        prop_assert_eq!(point_add(&a, &b), oracle::to_lib(&expect));
    }

    #[test]
    fn scalar_mul_matches_oracle(k in any::<u128>()) {
        let expect = oracle::mul(&BigUint::from(k), &oracle::g());
        prop_assert_eq!(oracle::from_lib(&scalar_mul(k, &generator())), expect);
    }

    #[test]
    fn sign_verify_roundtrip_and_corruption(
        seed in any::<u64>(),
        msg in any::<[u8; 16]>(),
        pos in 0usize..48,
        mask in 1u8..=255,
    ) {
        let key = common::key(seed);
        let d = Digest(msg);
        let sig = ecdsa_sign(&key, &d);
        prop_assert!(ecdsa_verify(&key.public(), &d, &sig).unwrap());

        if pos < 16 {
            let mut bad = msg;
            bad[pos] ^= mask;
            prop_assert!(!ecdsa_verify(&key.public(), &Digest(bad), &sig).unwrap());
        } else {
            let mut bytes = sig.to_bytes();
            bytes[pos - 16] ^= mask;
            let rejected = match EcdsaSignature::from_bytes(&bytes) {
                Err(_) => true,
                Ok(s) => !ecdsa_verify(&key.public(), &d, &s).unwrap(),
            };
            prop_assert!(rejected);
        }
    }
}

#[test]
fn digest_of_reference_uid() {
    let d = digest_uid(&[0xE0, 0x04, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06]).unwrap();
    assert_eq!(
        hex::encode(d.as_bytes()),
        "084c6679e5c5c0e33cc38332492114a9"
    );
}

#[test]
fn public_key_matches_oracle() {
    let key = KeyPair::from_private(Scalar::new(0xdead_beef_cafe).unwrap()).unwrap();
    let expect = oracle::mul(&BigUint::from(0xdead_beef_cafe_u64), &oracle::g());
    assert_eq!(oracle::from_lib(&key.public()), expect);
}
