// A module heats up past the alarm threshold during monitoring.

use nfc_bms::battery::{detect_thermal_alarm, TemperatureProfile};
use nfc_bms::ec::KeyPair;
use nfc_bms::system::SystemBlueprint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> nfc_bms::Result<()> {
    let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(6));
    let mut bp = SystemBlueprint::provisioned(&key, 1);
    bp.tags[0].module.temperature_profile = TemperatureProfile::Ramp {
        from_c: 45.0,
        to_c: 75.0,
        duration_ms: 1200.0,
    };
    let uid = bp.tags[0].uid;
    let mut sim = bp.build()?;
    sim.discover();
    sim.run_initialization(&uid)?;

    let mon = sim.run_monitoring(&uid, 25)?;
    for s in &mon.samples {
        let alarm = detect_thermal_alarm(&s.status, bp.alarm_threshold_dc);
        println!(
            "{:>8.1} ms  {:>5} dC {}",
            s.timestamp_ms,
            s.status.temperature_dc.unwrap_or_default(),
            if alarm { "ALARM" } else { "" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
