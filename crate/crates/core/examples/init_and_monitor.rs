// Initialization timeline of one module followed by ten monitoring samples.

use nfc_bms::ec::KeyPair;
use nfc_bms::system::SystemBlueprint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> nfc_bms::Result<()> {
    let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(1));
    let bp = SystemBlueprint::provisioned(&key, 1);
    let uid = bp.tags[0].uid;
    let mut sim = bp.build()?;
    sim.discover();

    let init = sim.run_initialization(&uid)?;
    for step in &init.steps {
        println!(
            "{:>9.2} ms  {:<15} {:>7.2} ms  {:?}",
            step.start_ms,
            format!("{:?}", step.step),
            step.duration_ms,
            step.outcome
        );
    }
    println!(
        "initialization: {:?} in {} ms",
        init.final_outcome, init.elapsed_ms
    );

    let mon = sim.run_monitoring(&uid, 10)?;
    for s in &mon.samples {
        let t = s.status.temperature_dc.unwrap_or_default();
        println!(
            "{:>9.2} ms  {} cells @ {} mV, {}.{} °C",
            s.timestamp_ms,
            s.status.voltages_mv.len(),
            s.status.voltages_mv[0],
            t / 10,
            t.abs() % 10
        );
    }
    println!(
        "monitoring: {} samples in {} ms",
        mon.samples.len(),
        mon.elapsed_ms
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
