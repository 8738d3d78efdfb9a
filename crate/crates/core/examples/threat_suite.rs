// Baseline plus the four threat scenarios, and the one attack the static
// signature cannot stop.

use nfc_bms::ec::KeyPair;
use nfc_bms::system::SystemBlueprint;
use nfc_bms::threat::run_suite;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> nfc_bms::Result<()> {
    let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(5));
    let bp = SystemBlueprint::provisioned(&key, 2);
    let suite = run_suite(&bp, 5)?;
    print!("{}", suite.table);
    for r in &suite.limitations {
        println!("{}: accepted={}", r.label, r.init_succeeded());
    }
    println!("suite passed: {}", suite.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
