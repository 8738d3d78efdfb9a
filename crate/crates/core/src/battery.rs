//! Battery module, cell voltage emulation, the NFC-attached temperature
//! sensor and the BCC aggregation step.

use serde::{Deserialize, Serialize};

use crate::auth::{AuthVerdict, TagUid};
use crate::error::Error;
use crate::link::{decode_temperature, LinkBus, LinkCommand, LinkStatus};

pub const MAX_CELL_MV: u16 = 5000;
pub const DEFAULT_CELL_COUNT: usize = 14;
pub const DEFAULT_SENSOR_INIT_MS: f64 = 116.1;
pub const DEFAULT_ALARM_THRESHOLD_DC: i16 = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryCellState {
    pub voltage_mv: u16,
}

/// Per-module cell voltage over virtual time. Every cell follows it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VoltageProfile {
    Constant {
        mv: u16,
    },
    /// Linear from `from_mv` at t=0 to `to_mv` at `duration_ms`, held afterwards.
    Ramp {
        from_mv: u16,
        to_mv: u16,
        duration_ms: f64,
    },
}

impl VoltageProfile {
    pub fn validate(&self) -> Result<(), Error> {
        let ok = match *self {
            VoltageProfile::Constant { mv } => mv <= MAX_CELL_MV,
            VoltageProfile::Ramp {
                from_mv,
                to_mv,
                duration_ms,
            } => from_mv <= MAX_CELL_MV && to_mv <= MAX_CELL_MV && duration_ms > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "voltage profile {self:?} outside 0..={MAX_CELL_MV} mV or with non-positive duration"
            )))
        }
    }

    pub fn at(&self, t_ms: f64) -> u16 {
        match *self {
            VoltageProfile::Constant { mv } => mv,
            VoltageProfile::Ramp {
                from_mv,
                to_mv,
                duration_ms,
            } => {
                let frac = (t_ms / duration_ms).clamp(0.0, 1.0);
                let v = f64::from(from_mv) + (f64::from(to_mv) - f64::from(from_mv)) * frac;
                v.round() as u16
            }
        }
    }
}

/// Temperature in °C over virtual time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TemperatureProfile {
    Constant {
        celsius: f64,
    },
    /// `before_c` until `at_ms`, `after_c` from `at_ms` on.
    Step {
        before_c: f64,
        after_c: f64,
        at_ms: f64,
    },
    Ramp {
        from_c: f64,
        to_c: f64,
        duration_ms: f64,
    },
}

impl TemperatureProfile {
    pub fn at(&self, t_ms: f64) -> f64 {
        match *self {
            TemperatureProfile::Constant { celsius } => celsius,
            TemperatureProfile::Step {
                before_c,
                after_c,
                at_ms,
            } => {
                if t_ms >= at_ms {
                    after_c
                } else {
                    before_c
                }
            }
            TemperatureProfile::Ramp {
                from_c,
                to_c,
                duration_ms,
            } => {
                let frac = if duration_ms > 0.0 {
                    (t_ms / duration_ms).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                from_c + (to_c - from_c) * frac
            }
        }
    }

    /// Value at `t_ms` rounded to the nearest deci-degree.
    pub fn deci_celsius_at(&self, t_ms: f64) -> i16 {
        (self.at(t_ms) * 10.0)
            .round()
            .clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSensor {
    pub profile: TemperatureProfile,
    pub initialized: bool,
    pub init_duration_ms: f64,
}

impl TemperatureSensor {
    pub fn new(profile: TemperatureProfile) -> Self {
        TemperatureSensor {
            profile,
            initialized: false,
            init_duration_ms: DEFAULT_SENSOR_INIT_MS,
        }
    }

    pub fn initialize(&mut self) {
        self.initialized = true;
    }

    pub(crate) fn reset(&mut self) {
        self.initialized = false;
    }

    pub fn read(&self, t_ms: f64) -> Result<i16, Error> {
        sensor_read(self, t_ms)
    }
}

pub fn sensor_read(sensor: &TemperatureSensor, t_ms: f64) -> Result<i16, Error> {
    if !sensor.initialized {
        return Err(Error::SensorUninitialized);
    }
    Ok(sensor.profile.deci_celsius_at(t_ms))
}

/// A battery module as seen by the BCC. Its tag and sensor live on the link
/// bus and are addressed through `tag_uid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryModule {
    pub id: String,
    cell_count: usize,
    pub voltage_profile: VoltageProfile,
    pub tag_uid: TagUid,
}

impl BatteryModule {
    pub fn new(
        id: impl Into<String>,
        cell_count: usize,
        voltage_profile: VoltageProfile,
        tag_uid: TagUid,
    ) -> Result<Self, Error> {
        if cell_count == 0 {
            return Err(Error::Config(
                "a battery module needs at least one cell".into(),
            ));
        }
        voltage_profile.validate()?;
        Ok(BatteryModule {
            id: id.into(),
            cell_count,
            voltage_profile,
            tag_uid,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }
}

/// Reads the cells over the wired path. Never touches the NFC link.
pub fn emulate_cell_voltages(module: &BatteryModule, t_ms: f64) -> Vec<BatteryCellState> {
    let mv = module.voltage_profile.at(t_ms);
    vec![BatteryCellState { voltage_mv: mv }; module.cell_count]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleStatus {
    pub module_id: String,
    pub voltages_mv: Vec<u16>,
    pub temperature_dc: Option<i16>,
    pub auth_state: AuthVerdict,
    pub timestamp_ms: f64,
}

/// Builds one status record: voltages from the wired path, temperature via a
/// ReadSensor exchange on the bus at the bus's current time.
pub fn bcc_collect(
    bus: &mut LinkBus,
    module: &BatteryModule,
    auth_state: AuthVerdict,
) -> Result<ModuleStatus, LinkStatus> {
    let t_ms = bus.now_ms();
    if bus.reader().selected_uid() != Some(module.tag_uid) {
        bus.transceive(LinkCommand::Select(module.tag_uid))
            .into_result()?;
    }
    let payload = bus.transceive(LinkCommand::ReadSensor).into_result()?;
    let temperature = decode_temperature(&payload).ok_or(LinkStatus::NotConfigured)?;
    let voltages_mv = emulate_cell_voltages(module, t_ms)
        .into_iter()
        .map(|c| c.voltage_mv)
        .collect();
    Ok(ModuleStatus {
        module_id: module.id.clone(),
        voltages_mv,
        temperature_dc: Some(temperature),
        auth_state,
        timestamp_ms: t_ms,
    })
}

/// Strictly above the threshold. A status without temperature never alarms.
pub fn detect_thermal_alarm(status: &ModuleStatus, threshold_dc: i16) -> bool {
    status.temperature_dc.is_some_and(|t| t > threshold_dc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uid() -> TagUid {
        TagUid::from_serial([1, 2, 3, 4, 5, 6, 7])
    }

    #[test]
    fn voltage_profiles() {
        let constant =
            BatteryModule::new("m", 14, VoltageProfile::Constant { mv: 3700 }, uid()).unwrap();
        assert!(emulate_cell_voltages(&constant, 12345.0)
            .iter()
            .all(|c| c.voltage_mv == 3700));
        assert_eq!(emulate_cell_voltages(&constant, 0.0).len(), 14);

        let ramp = VoltageProfile::Ramp {
            from_mv: 3600,
            to_mv: 3700,
            duration_ms: 1000.0,
        };
        assert_eq!(ramp.at(500.0), 3650);
        assert_eq!(ramp.at(0.0), 3600);
        assert_eq!(ramp.at(5000.0), 3700);
    }

    #[test]
    fn module_validation() {
        assert!(BatteryModule::new("m", 0, VoltageProfile::Constant { mv: 3700 }, uid()).is_err());
        assert!(BatteryModule::new("m", 1, VoltageProfile::Constant { mv: 5001 }, uid()).is_err());
    }

    #[test]
    fn sensor_reads() {
        let mut s = TemperatureSensor::new(TemperatureProfile::Constant { celsius: 25.0 });
        assert!(matches!(
            sensor_read(&s, 0.0),
            Err(Error::SensorUninitialized)
        ));
        s.initialize();
        assert_eq!(sensor_read(&s, 0.0).unwrap(), 250);

        let mut step = TemperatureSensor::new(TemperatureProfile::Step {
            before_c: 25.0,
            after_c: 60.5,
            at_ms: 1000.0,
        });
        step.initialize();
        assert_eq!(step.read(1500.0).unwrap(), 605);
        assert_eq!(step.read(999.0).unwrap(), 250);
    }

    #[test]
    fn alarm_is_strict() {
        let mut status = ModuleStatus {
            module_id: "m".into(),
            voltages_mv: vec![],
            temperature_dc: Some(610),
            auth_state: AuthVerdict::Accepted,
            timestamp_ms: 0.0,
        };
        assert!(detect_thermal_alarm(&status, 600));
        status.temperature_dc = Some(600);
        assert!(!detect_thermal_alarm(&status, 600));
        status.temperature_dc = Some(250);
        assert!(!detect_thermal_alarm(&status, 600));
        status.temperature_dc = None;
        assert!(!detect_thermal_alarm(&status, 600));
    }
}
