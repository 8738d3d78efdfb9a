mod common;

use nfc_bms::auth::{
    authenticate, authenticate_with, provision_tag, AllowList, AuditEvent, AuthVerdict,
    OriginalitySignature, SignatureVerifier, TagUid, VerifierConfig,
};
use nfc_bms::ec::{CurvePoint, EcdsaSignature};
use proptest::prelude::*;

#[derive(Default)]
struct CountingVerifier {
    calls: usize,
}

impl SignatureVerifier for CountingVerifier {
    fn verify(&mut self, public: &CurvePoint, uid: &TagUid, sig: &EcdsaSignature) -> bool {
        self.calls += 1;
        nfc_bms::auth::EcdsaVerifier.verify(public, uid, sig)
    }
}

fn uid_strategy() -> impl Strategy<Value = TagUid> {
    any::<[u8; 7]>().prop_map(TagUid::from_serial)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verification_only_after_uid_passes(
        listed in proptest::collection::vec(uid_strategy(), 0..5),
        probe in uid_strategy(),
        sig in any::<[u8; 32]>(),
        use_valid in any::<bool>(),
    ) {
        let key = common::key(42);
        let cfg = VerifierConfig::new(key.public(), listed.iter().copied().collect()).unwrap();
        let sig = if use_valid { provision_tag(&key, &probe) } else { OriginalitySignature(sig) };
        let mut counter = CountingVerifier::default();
        let out = authenticate_with(&cfg, &probe, &sig, &mut counter);

        let known = listed.contains(&probe);
        prop_assert_eq!(out.audit[0], AuditEvent::UidCheck { passed: known });
        if !known {
            prop_assert_eq!(counter.calls, 0);
            prop_assert_eq!(out.verify_calls(), 0);
            prop_assert_eq!(out.verdict, AuthVerdict::RejectedUnknownUid);
        } else {
            prop_assert!(counter.calls <= 1);
            prop_assert_eq!(counter.calls, out.verify_calls());
            if use_valid {
                prop_assert_eq!(out.verdict, AuthVerdict::Accepted);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wrong_signatures_never_accepted(uid in uid_strategy(), other_uid in uid_strategy(), seed in any::<u64>()) {
        prop_assume!(uid != other_uid);
        let key = common::key(7);
        let cfg = VerifierConfig::new(key.public(), [uid].into_iter().collect()).unwrap();
        // signature for another tag, and one from an unrelated key
        let borrowed = provision_tag(&key, &other_uid);
        let foreign = provision_tag(&common::key(seed.wrapping_add(1000)), &uid);
        prop_assert_ne!(authenticate(&cfg, &uid, &borrowed).verdict, AuthVerdict::Accepted);
        prop_assert_ne!(authenticate(&cfg, &uid, &foreign).verdict, AuthVerdict::Accepted);
    }

    #[test]
    fn provisioned_tags_always_accepted(uids in proptest::collection::btree_set(uid_strategy(), 1..6)) {
        let key = common::key(8);
        let list: AllowList = uids.iter().copied().collect();
        let cfg = VerifierConfig::new(key.public(), list).unwrap();
        for uid in &uids {
            let sig = provision_tag(&key, uid);
            let first = authenticate(&cfg, uid, &sig);
            prop_assert_eq!(first.verdict, AuthVerdict::Accepted);
            prop_assert_eq!(first, authenticate(&cfg, uid, &sig));
        }
    }
}

#[test]
fn allowlist_file_format() {
    let list: AllowList =
        serde_json::from_str(r#"["E004010203040506", "E0AABBCCDDEEFF00"]"#).unwrap();
    assert_eq!(list.len(), 2);
    assert!(serde_json::from_str::<AllowList>(r#"["E0040102"]"#).is_err());
    let back = serde_json::to_string(&list).unwrap();
    assert_eq!(back, r#"["E004010203040506","E0AABBCCDDEEFF00"]"#);
}
