// A resumed session costs nothing; losing the field forces a full re-init.

use nfc_bms::ec::KeyPair;
use nfc_bms::system::SystemBlueprint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> nfc_bms::Result<()> {
    let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(4));
    let bp = SystemBlueprint::provisioned(&key, 1);
    let uid = bp.tags[0].uid;
    let mut sim = bp.build()?;
    sim.discover();

    let first = sim.resume_session(&uid)?;
    println!(
        "cold start:  resumed={} {} ms",
        first.resumed, first.elapsed_ms
    );
    let again = sim.resume_session(&uid)?;
    println!(
        "warm resume: resumed={} {} ms",
        again.resumed, again.elapsed_ms
    );

    let at = sim.now_ms() + 2.0 * 27.2;
    sim.schedule_distance_change(at, uid, 9.0);
    let mon = sim.run_monitoring(&uid, 5)?;
    if let Some(lost) = mon.field_lost {
        println!(
            "field lost after {} samples at {} ms ({:?})",
            lost.after_samples, lost.at_ms, lost.status
        );
    }

    sim.set_tag_distance(&uid, 2.0)?;
    let re = sim.resume_session(&uid)?;
    println!(
        "after field loss: resumed={} {} ms {:?}",
        re.resumed, re.elapsed_ms, re.final_outcome
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
