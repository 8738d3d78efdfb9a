//! A resolved, in-memory description of a whole BMS setup that can be built
//! into a fresh [`Simulation`] any number of times.

use serde::{Deserialize, Serialize};

use crate::auth::{provision_tag, AllowList, OriginalitySignature, TagUid, VerifierConfig};
use crate::battery::{
    BatteryModule, TemperatureProfile, TemperatureSensor, VoltageProfile,
    DEFAULT_ALARM_THRESHOLD_DC, DEFAULT_CELL_COUNT,
};
use crate::ec::{CurvePoint, KeyPair};
use crate::error::Error;
use crate::link::{Block, FieldModel, LinkBus, NfcTagDevice, PayloadFault, DEFAULT_BLOCK_COUNT};
use crate::orchestrator::{PhaseTimings, Simulation};

/// Operating distance used on the bench.
pub const OPERATING_DISTANCE_CM: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSetup {
    pub id: String,
    #[serde(default = "default_cell_count")]
    pub cell_count: usize,
    #[serde(default = "default_voltage_profile")]
    pub voltage_profile: VoltageProfile,
    #[serde(default = "default_temperature_profile")]
    pub temperature_profile: TemperatureProfile,
}

fn default_cell_count() -> usize {
    DEFAULT_CELL_COUNT
}

fn default_voltage_profile() -> VoltageProfile {
    VoltageProfile::Constant { mv: 3700 }
}

fn default_temperature_profile() -> TemperatureProfile {
    TemperatureProfile::Constant { celsius: 25.0 }
}

impl ModuleSetup {
    pub fn healthy(id: impl Into<String>) -> Self {
        ModuleSetup {
            id: id.into(),
            cell_count: DEFAULT_CELL_COUNT,
            voltage_profile: default_voltage_profile(),
            temperature_profile: default_temperature_profile(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagSetup {
    pub uid: TagUid,
    pub signature: OriginalitySignature,
    pub blocks: Vec<Block>,
    pub distance_cm: f64,
    pub module: ModuleSetup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemBlueprint {
    pub field: FieldModel,
    pub tags: Vec<TagSetup>,
    pub public_key: CurvePoint,
    pub allowlist: AllowList,
    pub timings: PhaseTimings,
    /// Cell pack enclosure is sealed: no physical access from outside.
    pub sealed: bool,
    pub fault: Option<PayloadFault>,
    pub alarm_threshold_dc: i16,
}

impl SystemBlueprint {
    /// `n_tags` provisioned, allowlisted modules at the operating distance
    /// with constant 3700 mV cells and 25.0 °C.
    pub fn provisioned(key: &KeyPair, n_tags: usize) -> Self {
        let tags = (0..n_tags)
            .map(|i| {
                let uid = TagUid::from_serial([
                    0x04,
                    0x00,
                    0x00,
                    0x00,
                    0x00,
                    (i >> 8) as u8,
                    i as u8 + 1,
                ]);
                TagSetup {
                    uid,
                    signature: provision_tag(key, &uid),
                    blocks: vec![[0; 4]; DEFAULT_BLOCK_COUNT],
                    distance_cm: OPERATING_DISTANCE_CM,
                    module: ModuleSetup::healthy(format!("module-{}", i + 1)),
                }
            })
            .collect::<Vec<_>>();
        SystemBlueprint {
            field: FieldModel::default(),
            allowlist: tags.iter().map(|t| t.uid).collect(),
            tags,
            public_key: key.public(),
            timings: PhaseTimings::default(),
            sealed: true,
            fault: None,
            alarm_threshold_dc: DEFAULT_ALARM_THRESHOLD_DC,
        }
    }

    pub fn tag(&self, uid: &TagUid) -> Option<&TagSetup> {
        self.tags.iter().find(|t| t.uid == *uid)
    }

    pub fn build(&self) -> Result<Simulation, Error> {
        let mut bus = LinkBus::new(self.field);
        let mut modules = Vec::with_capacity(self.tags.len());
        for setup in &self.tags {
            let sensor = TemperatureSensor::new(setup.module.temperature_profile);
            let tag = NfcTagDevice::with_blocks(setup.uid, setup.signature, setup.blocks.clone())
                .attach_sensor(sensor);
            bus.attach(tag, setup.distance_cm)?;
            modules.push(BatteryModule::new(
                setup.module.id.clone(),
                setup.module.cell_count,
                setup.module.voltage_profile,
                setup.uid,
            )?);
        }
        bus.set_fault(self.fault);
        let verifier = VerifierConfig::new(self.public_key, self.allowlist.clone())?;
        Simulation::new(bus, modules, verifier, self.timings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn provisioned_blueprint_builds() {
        let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(3));
        let bp = SystemBlueprint::provisioned(&key, 3);
        assert_eq!(bp.allowlist.len(), 3);
        let sim = bp.build().unwrap();
        assert_eq!(sim.modules().len(), 3);
        assert_eq!(sim.bus().tags().count(), 3);
    }
}
