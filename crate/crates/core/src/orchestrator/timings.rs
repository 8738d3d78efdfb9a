use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::clock::ms_to_us;
use crate::error::Error;

/// Measured bench means for each lifecycle step, in milliseconds.
pub const AUTH_MS: f64 = 369.3;
pub const ENERGY_CHECK_MS: f64 = 19.64;
pub const NTAG_INIT_MS: f64 = 29.16;
pub const SENSOR_INIT_MS: f64 = 116.1;
pub const MEASUREMENT_MS: f64 = 27.2;

pub const MAX_JITTER_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseTimings {
    pub auth_ms: f64,
    pub energy_check_ms: f64,
    pub ntag_init_ms: f64,
    pub sensor_init_ms: f64,
    pub measurement_ms: f64,
    pub jitter_fraction: f64,
    pub seed: u64,
}

impl Default for PhaseTimings {
    fn default() -> Self {
        PhaseTimings {
            auth_ms: AUTH_MS,
            energy_check_ms: ENERGY_CHECK_MS,
            ntag_init_ms: NTAG_INIT_MS,
            sensor_init_ms: SENSOR_INIT_MS,
            measurement_ms: MEASUREMENT_MS,
            jitter_fraction: 0.0,
            seed: 0,
        }
    }
}

impl PhaseTimings {
    pub fn validate(&self) -> Result<(), Error> {
        let durations = [
            ("auth_ms", self.auth_ms),
            ("energy_check_ms", self.energy_check_ms),
            ("ntag_init_ms", self.ntag_init_ms),
            ("sensor_init_ms", self.sensor_init_ms),
            ("measurement_ms", self.measurement_ms),
        ];
        for (name, v) in durations {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(0.0..=MAX_JITTER_FRACTION).contains(&self.jitter_fraction) {
            return Err(Error::Config(format!(
                "jitter_fraction must be in [0, 0.5], got {}",
                self.jitter_fraction
            )));
        }
        Ok(())
    }

    /// Nominal initialization total in microseconds.
    pub fn init_total_us(&self) -> u64 {
        ms_to_us(self.auth_ms)
            + ms_to_us(self.energy_check_ms)
            + ms_to_us(self.ntag_init_ms)
            + ms_to_us(self.sensor_init_ms)
    }
}

/// Turns nominal durations into realized ones. With zero jitter the nominal
/// value is returned and no randomness is consumed.
#[derive(Debug, Clone)]
pub struct DurationSampler {
    jitter: f64,
    rng: ChaCha8Rng,
}

impl DurationSampler {
    pub fn new(jitter_fraction: f64, seed: u64) -> Self {
        DurationSampler {
            jitter: jitter_fraction,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn realize_us(&mut self, nominal_ms: f64) -> u64 {
        let nominal = nominal_ms * 1000.0;
        if self.jitter == 0.0 {
            return nominal.round() as u64;
        }
        let lo = (nominal * (1.0 - self.jitter)).ceil();
        let hi = (nominal * (1.0 + self.jitter)).floor();
        let u: f64 = self.rng.gen_range(-self.jitter..=self.jitter);
        (nominal * (1.0 + u)).round().clamp(lo, hi.max(lo)) as u64
    }
}
