// Provision two tags with a manufacturer key, then authenticate a genuine
// tag, an unlisted tag and a tag signed by someone else.

use nfc_bms::auth::{authenticate, provision_tag, AllowList, TagUid, VerifierConfig};
use nfc_bms::ec::KeyPair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> nfc_bms::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let manufacturer = KeyPair::generate(&mut rng);
    let genuine: TagUid = "E004010203040506".parse()?;
    let unlisted: TagUid = "E0040102030405FF".parse()?;

    let allowlist: AllowList = [genuine].into_iter().collect();
    let cfg = VerifierConfig::new(manufacturer.public(), allowlist)?;

    let sig = provision_tag(&manufacturer, &genuine);
    println!("{genuine} signature {}", hex::encode_upper(sig.0));

    let ok = authenticate(&cfg, &genuine, &sig);
    println!(
        "genuine tag:   {:?} ({} verify call)",
        ok.verdict,
        ok.verify_calls()
    );

    let unknown = authenticate(&cfg, &unlisted, &provision_tag(&manufacturer, &unlisted));
    println!(
        "unlisted tag:  {:?} ({} verify calls)",
        unknown.verdict,
        unknown.verify_calls()
    );

    let forger = KeyPair::generate(&mut rng);
    let forged = authenticate(&cfg, &genuine, &provision_tag(&forger, &genuine));
    println!("forged signer: {:?}", forged.verdict);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
