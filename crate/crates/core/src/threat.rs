//! Executable threat scenarios.
//!
//! Each threat is an injection into an otherwise healthy system. Running a
//! scenario replays discovery and initialization against the injected system
//! and records which countermeasure, if any, stopped it.
//!
//! | Threat | Injection                    | Asset | Expected countermeasure |
//! |--------|------------------------------|-------|-------------------------|
//! | T1     | counterfeit module, new UID  | A2    | C1                      |
//! | T2     | counterfeit module, cloned UID, foreign-key signature | A1 | C1 |
//! | T3     | corrupted signature on the NFC link | A2 | C1 or C3           |
//! | T4     | attacker reader at a distance | A1   | C2 or C3                |

use std::fmt::{self, Write as _};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::auth::{provision_tag, AuditEvent, AuthVerdict, TagUid};
use crate::battery::{ModuleStatus, TemperatureProfile};
use crate::ec::KeyPair;
use crate::error::Error;
use crate::link::{FaultTarget, LinkBus, LinkCommand, NfcTagDevice, PayloadFault};
use crate::orchestrator::{InitOutcome, InitReport};
use crate::system::SystemBlueprint;

/// Samples collected after a successful initialization, to see what data a
/// scenario lets through to the BMS controller.
pub const PROBE_SAMPLES: usize = 3;
pub const DEFAULT_ATTACKER_DISTANCE_CM: f64 = 50.0;
pub const COUNTERFEIT_PREFIX: &str = "counterfeit:";
const COUNTERFEITER_SEED_SALT: u64 = 0xC0FF_EE00_BAD5_EED5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThreatId {
    T1,
    T2,
    T3,
    T4,
}

impl ThreatId {
    pub const ALL: [ThreatId; 4] = [ThreatId::T1, ThreatId::T2, ThreatId::T3, ThreatId::T4];

    pub fn title(self) -> &'static str {
        match self {
            ThreatId::T1 => "Battery control obstruction",
            ThreatId::T2 => "Tamper with BMS status messages",
            ThreatId::T3 => "Backdoor access",
            ThreatId::T4 => "Remote attack",
        }
    }

    /// Countermeasures that count as a correct block for this threat.
    pub fn mitigations(self) -> &'static [Countermeasure] {
        match self {
            ThreatId::T1 | ThreatId::T2 => &[Countermeasure::C1],
            ThreatId::T3 => &[Countermeasure::C1, Countermeasure::C3],
            ThreatId::T4 => &[Countermeasure::C2, Countermeasure::C3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Asset {
    /// Sensor (status) data.
    A1,
    /// System integrity.
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Countermeasure {
    /// Authentication through signature validation.
    C1,
    /// Cell pack sealing.
    C2,
    /// NFC physical layer characteristic.
    C3,
}

impl Countermeasure {
    pub fn title(self) -> &'static str {
        match self {
            Countermeasure::C1 => "Authentication through signature validation",
            Countermeasure::C2 => "Cell pack sealing",
            Countermeasure::C3 => "NFC physical layer characteristic",
        }
    }
}

impl fmt::Display for Countermeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Injection {
    CounterfeitUnknownUid,
    CounterfeitClonedUid,
    TamperLinkPayload {
        #[serde(default)]
        byte_index: usize,
        #[serde(default = "default_mask")]
        xor_mask: u8,
    },
    RemoteAttacker {
        #[serde(default = "default_attacker_distance")]
        distance_cm: f64,
    },
}

fn default_mask() -> u8 {
    0x01
}

fn default_attacker_distance() -> f64 {
    DEFAULT_ATTACKER_DISTANCE_CM
}

impl Injection {
    fn threat(&self) -> ThreatId {
        match self {
            Injection::CounterfeitUnknownUid => ThreatId::T1,
            Injection::CounterfeitClonedUid => ThreatId::T2,
            Injection::TamperLinkPayload { .. } => ThreatId::T3,
            Injection::RemoteAttacker { .. } => ThreatId::T4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreatScenario {
    pub id: ThreatId,
    pub injection: Injection,
    pub target_asset: Asset,
}

impl ThreatScenario {
    pub fn standard(id: ThreatId) -> Self {
        let (injection, target_asset) = match id {
            ThreatId::T1 => (Injection::CounterfeitUnknownUid, Asset::A2),
            ThreatId::T2 => (Injection::CounterfeitClonedUid, Asset::A1),
            ThreatId::T3 => (
                Injection::TamperLinkPayload {
                    byte_index: 0,
                    xor_mask: default_mask(),
                },
                Asset::A2,
            ),
            ThreatId::T4 => (
                Injection::RemoteAttacker {
                    distance_cm: DEFAULT_ATTACKER_DISTANCE_CM,
                },
                Asset::A1,
            ),
        };
        ThreatScenario {
            id,
            injection,
            target_asset,
        }
    }

    /// The threat/injection pairing is fixed.
    pub fn validate(&self) -> Result<(), Error> {
        if self.injection.threat() != self.id {
            return Err(Error::Config(format!(
                "threat {:?} cannot use injection {:?}",
                self.id, self.injection
            )));
        }
        if let Injection::TamperLinkPayload {
            byte_index,
            xor_mask,
        } = self.injection
        {
            if byte_index >= 32 || xor_mask == 0 {
                return Err(Error::Config(
                    "tamper injection needs byte_index < 32 and a nonzero mask".into(),
                ));
            }
        }
        if let Injection::RemoteAttacker { distance_cm } = self.injection {
            if !(distance_cm.is_finite() && distance_cm >= 0.0) {
                return Err(Error::NegativeDistance(distance_cm));
            }
        }
        Ok(())
    }
}

/// An out-of-enclosure reader the attacker controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerReader {
    pub distance_cm: f64,
}

/// A blueprint with one injection applied.
#[derive(Debug, Clone)]
pub struct InjectedSystem {
    pub blueprint: SystemBlueprint,
    pub target: TagUid,
    pub attacker: Option<AttackerReader>,
}

/// Applies the scenario's injection to the first tag of the blueprint.
pub fn inject(
    scenario: &ThreatScenario,
    system: &SystemBlueprint,
    seed: u64,
) -> Result<InjectedSystem, Error> {
    scenario.validate()?;
    let mut bp = system.clone();
    let first = bp
        .tags
        .first()
        .ok_or_else(|| Error::Config("threat injection needs at least one tag".into()))?;
    let genuine_uid = first.uid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ COUNTERFEITER_SEED_SALT);
    let counterfeiter = KeyPair::generate(&mut rng);
    let mut attacker = None;
    let mut target = genuine_uid;

    match scenario.injection {
        Injection::CounterfeitUnknownUid => {
            let uid = loop {
                let mut serial = [0u8; 7];
                rng.fill_bytes(&mut serial);
                let candidate = TagUid::from_serial(serial);
                if !bp.allowlist.contains(&candidate) && bp.tag(&candidate).is_none() {
                    break candidate;
                }
            };
            let tag = &mut bp.tags[0];
            tag.uid = uid;
            // a genuine signature, just under the counterfeiter's own key
            tag.signature = provision_tag(&counterfeiter, &uid);
            mark_counterfeit(tag);
            target = uid;
        }
        Injection::CounterfeitClonedUid => {
            let tag = &mut bp.tags[0];
            tag.signature = provision_tag(&counterfeiter, &tag.uid);
            mark_counterfeit(tag);
        }
        Injection::TamperLinkPayload {
            byte_index,
            xor_mask,
        } => {
            bp.fault = Some(PayloadFault {
                target: FaultTarget::ReadSignature,
                byte_index,
                xor_mask,
            });
        }
        Injection::RemoteAttacker { distance_cm } => {
            attacker = Some(AttackerReader { distance_cm });
        }
    }
    Ok(InjectedSystem {
        blueprint: bp,
        target,
        attacker,
    })
}

fn mark_counterfeit(tag: &mut crate::system::TagSetup) {
    tag.module.id = format!("{COUNTERFEIT_PREFIX}{}", tag.module.id);
    // spoofed readings the attacker would like the BMS to act on
    tag.module.temperature_profile = TemperatureProfile::Constant { celsius: -40.0 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Evidence {
    Discovery {
        found: Vec<TagUid>,
    },
    TargetMissing {
        uid: TagUid,
    },
    Authentication {
        verdict: AuthVerdict,
        audit: Vec<AuditEvent>,
    },
    InitFinished {
        outcome: InitOutcome,
    },
    StatusDelivered {
        module_id: String,
    },
    EnclosureSealed,
    AttackerField {
        distance_cm: f64,
        powered: bool,
    },
    AttackerRead {
        command: String,
        ok: bool,
    },
    CountermeasureFired {
        countermeasure: Countermeasure,
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    /// `None` for the baseline and the documented limitation runs.
    pub threat_id: Option<ThreatId>,
    pub label: String,
    pub target_asset: Option<Asset>,
    pub blocked: bool,
    pub blocking_countermeasure: Option<Countermeasure>,
    pub evidence: Vec<Evidence>,
    pub init: Option<InitReport>,
    pub delivered: Vec<ModuleStatus>,
}

impl ScenarioResult {
    pub fn countermeasure_events(&self) -> usize {
        self.evidence
            .iter()
            .filter(|e| matches!(e, Evidence::CountermeasureFired { .. }))
            .count()
    }

    pub fn init_succeeded(&self) -> bool {
        self.init.as_ref().is_some_and(|r| r.succeeded())
    }

    /// True when the blocking countermeasure is one the threat maps to.
    pub fn correctly_mitigated(&self) -> bool {
        match (self.threat_id, self.blocking_countermeasure) {
            (Some(id), Some(c)) => self.blocked && id.mitigations().contains(&c),
            _ => false,
        }
    }
}

/// Discovery + initialization + a short probe against one (possibly injected) system.
fn exercise(
    bp: &SystemBlueprint,
    target: &TagUid,
    evidence: &mut Vec<Evidence>,
) -> Result<(Option<InitReport>, Vec<ModuleStatus>), Error> {
    let mut sim = bp.build()?;
    let found = sim.discover();
    evidence.push(Evidence::Discovery {
        found: found.clone(),
    });
    if !found.contains(target) {
        evidence.push(Evidence::TargetMissing { uid: *target });
        return Ok((None, Vec::new()));
    }
    let init = sim.run_initialization(target)?;
    if let Some((_, auth)) = sim.auth_log().last() {
        evidence.push(Evidence::Authentication {
            verdict: auth.verdict,
            audit: auth.audit.clone(),
        });
    }
    evidence.push(Evidence::InitFinished {
        outcome: init.final_outcome,
    });
    let mut delivered = Vec::new();
    if init.succeeded() {
        let report = sim.run_monitoring(target, PROBE_SAMPLES)?;
        for s in report.samples {
            evidence.push(Evidence::StatusDelivered {
                module_id: s.status.module_id.clone(),
            });
            delivered.push(s.status);
        }
    }
    Ok((Some(init), delivered))
}

/// Healthy system, no injection.
pub fn run_baseline(system: &SystemBlueprint) -> Result<ScenarioResult, Error> {
    let target = system
        .tags
        .first()
        .ok_or_else(|| Error::Config("baseline needs at least one tag".into()))?
        .uid;
    let mut evidence = Vec::new();
    let (init, delivered) = exercise(system, &target, &mut evidence)?;
    Ok(ScenarioResult {
        threat_id: None,
        label: "baseline".into(),
        target_asset: None,
        blocked: false,
        blocking_countermeasure: None,
        evidence,
        init,
        delivered,
    })
}

pub fn run_scenario(
    scenario: &ThreatScenario,
    system: &SystemBlueprint,
    seed: u64,
) -> Result<ScenarioResult, Error> {
    let injected = inject(scenario, system, seed)?;
    let mut evidence = Vec::new();
    let mut blocking = None;

    let (init, delivered) = match injected.attacker {
        Some(attacker) => {
            blocking = remote_attack(&injected, attacker, &mut evidence);
            (None, Vec::new())
        }
        None => {
            let (init, delivered) = exercise(&injected.blueprint, &injected.target, &mut evidence)?;
            if let Some(report) = &init {
                if report.final_outcome == InitOutcome::AbortedAuth {
                    let c = Countermeasure::C1;
                    evidence.push(Evidence::CountermeasureFired {
                        countermeasure: c,
                        detail: "signature validation rejected the module".into(),
                    });
                    blocking = Some(c);
                }
            }
            (init, delivered)
        }
    };

    Ok(ScenarioResult {
        threat_id: Some(scenario.id),
        label: format!("{:?}: {}", scenario.id, scenario.id.title()),
        target_asset: Some(scenario.target_asset),
        blocked: blocking.is_some(),
        blocking_countermeasure: blocking,
        evidence,
        init,
        delivered,
    })
}

/// The attacker brings their own reader. Returns the first countermeasure
/// that stopped them.
fn remote_attack(
    injected: &InjectedSystem,
    attacker: AttackerReader,
    evidence: &mut Vec<Evidence>,
) -> Option<Countermeasure> {
    let bp = &injected.blueprint;
    let setup = bp.tag(&injected.target)?;
    let mut blocking = None;

    let powered = bp.field.powered(attacker.distance_cm);
    evidence.push(Evidence::AttackerField {
        distance_cm: attacker.distance_cm,
        powered,
    });
    if !powered {
        evidence.push(Evidence::CountermeasureFired {
            countermeasure: Countermeasure::C3,
            detail: format!(
                "tag cannot harvest energy at {} cm (limit {} cm)",
                attacker.distance_cm, bp.field.d_max_cm
            ),
        });
        blocking = Some(Countermeasure::C3);
    }
    if bp.sealed {
        evidence.push(Evidence::EnclosureSealed);
        if powered {
            // proximity would need physical access, which the sealed pack denies
            evidence.push(Evidence::CountermeasureFired {
                countermeasure: Countermeasure::C2,
                detail: "reaching tag range requires opening the sealed cell pack".into(),
            });
            blocking = blocking.or(Some(Countermeasure::C2));
        }
    }
    if blocking.is_some() {
        return blocking;
    }

    // unsealed and in range: the attack goes through
    let mut bus = LinkBus::new(bp.field);
    let tag = NfcTagDevice::with_blocks(setup.uid, setup.signature, setup.blocks.clone());
    if bus.attach(tag, attacker.distance_cm).is_err() {
        return None;
    }
    let found = bus.discovery_loop();
    evidence.push(Evidence::Discovery { found });
    for cmd in [
        LinkCommand::Select(setup.uid),
        LinkCommand::ReadSignature,
        LinkCommand::WriteBlock(0, *b"EVIL"),
    ] {
        let label = cmd.to_string();
        let ok = bus.transceive(cmd).is_ok();
        evidence.push(Evidence::AttackerRead { command: label, ok });
    }
    None
}

/// A bit-exact copy of a genuine UID and signature on counterfeit hardware.
/// The static scheme accepts it; this run documents that boundary.
pub fn run_exact_clone_limitation(system: &SystemBlueprint) -> Result<ScenarioResult, Error> {
    let mut bp = system.clone();
    let tag = bp
        .tags
        .first_mut()
        .ok_or_else(|| Error::Config("clone run needs at least one tag".into()))?;
    mark_counterfeit(tag);
    let target = tag.uid;
    let mut evidence = Vec::new();
    let (init, delivered) = exercise(&bp, &target, &mut evidence)?;
    Ok(ScenarioResult {
        threat_id: None,
        label: "expected limitation: bit-exact UID + signature clone".into(),
        target_asset: Some(Asset::A2),
        blocked: false,
        blocking_countermeasure: None,
        evidence,
        init,
        delivered,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub baseline: ScenarioResult,
    pub results: Vec<ScenarioResult>,
    pub limitations: Vec<ScenarioResult>,
    pub baseline_ok: bool,
    pub all_blocked: bool,
    pub table: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.baseline_ok && self.all_blocked
    }
}

/// Baseline plus T1..T4, each in its own simulation domain, on separate threads.
pub fn run_suite(system: &SystemBlueprint, seed: u64) -> Result<SuiteReport, Error> {
    let (baseline, results, limitation) = std::thread::scope(|s| {
        let baseline = s.spawn(|| run_baseline(system));
        let threats: Vec<_> = ThreatId::ALL
            .iter()
            .map(|id| s.spawn(move || run_scenario(&ThreatScenario::standard(*id), system, seed)))
            .collect();
        let limitation = s.spawn(|| run_exact_clone_limitation(system));
        let join = |h: std::thread::ScopedJoinHandle<'_, Result<ScenarioResult, Error>>| {
            h.join().expect("scenario thread panicked")
        };
        (
            join(baseline),
            threats.into_iter().map(join).collect::<Vec<_>>(),
            join(limitation),
        )
    });
    let baseline = baseline?;
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let limitations = vec![limitation?];

    let baseline_ok = baseline.init_succeeded() && baseline.countermeasure_events() == 0;
    let all_blocked = results.iter().all(ScenarioResult::correctly_mitigated);
    let table = render_table(&baseline, &results);
    Ok(SuiteReport {
        baseline,
        results,
        limitations,
        baseline_ok,
        all_blocked,
        table,
    })
}

/// Threat / asset / countermeasure table.
pub fn render_table(baseline: &ScenarioResult, results: &[ScenarioResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:<34} {:<6} {:<14} {:<8} Expected",
        "Threat", "Description", "Asset", "Countermeasure", "Blocked"
    );
    for r in results {
        let Some(id) = r.threat_id else { continue };
        let expected = id
            .mitigations()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("|");
        let _ = writeln!(
            out,
            "{:<6} {:<34} {:<6} {:<14} {:<8} {}",
            format!("{id:?}"),
            id.title(),
            r.target_asset.map(|a| format!("{a:?}")).unwrap_or_default(),
            r.blocking_countermeasure
                .map(|c| c.to_string())
                .unwrap_or_else(|| "none".into()),
            if r.blocked { "yes" } else { "NO" },
            expected
        );
    }
    let _ = writeln!(
        out,
        "baseline: init {:?}, countermeasure events {}",
        baseline.init.as_ref().map(|i| i.final_outcome),
        baseline.countermeasure_events()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system() -> SystemBlueprint {
        let key = KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(11));
        SystemBlueprint::provisioned(&key, 1)
    }

    #[test]
    fn pairing_is_enforced() {
        let bad = ThreatScenario {
            id: ThreatId::T1,
            injection: Injection::CounterfeitClonedUid,
            target_asset: Asset::A1,
        };
        assert!(bad.validate().is_err());
        for id in ThreatId::ALL {
            ThreatScenario::standard(id).validate().unwrap();
        }
    }

    #[test]
    fn unknown_uid_injection_is_rejected_by_allowlist() {
        let bp = system();
        let inj = inject(&ThreatScenario::standard(ThreatId::T1), &bp, 0).unwrap();
        assert!(!bp.allowlist.contains(&inj.target));
        let r = run_scenario(&ThreatScenario::standard(ThreatId::T1), &bp, 0).unwrap();
        assert!(r.evidence.iter().any(|e| matches!(
            e,
            Evidence::Authentication {
                verdict: AuthVerdict::RejectedUnknownUid,
                ..
            }
        )));
    }

    #[test]
    fn cloned_uid_is_rejected_by_signature() {
        let r = run_scenario(&ThreatScenario::standard(ThreatId::T2), &system(), 0).unwrap();
        assert!(r.evidence.iter().any(|e| matches!(
            e,
            Evidence::Authentication {
                verdict: AuthVerdict::RejectedBadSignature,
                ..
            }
        )));
        assert_eq!(r.blocking_countermeasure, Some(Countermeasure::C1));
    }

    #[test]
    fn remote_attacker_out_of_range() {
        let bp = system();
        let inj = inject(&ThreatScenario::standard(ThreatId::T4), &bp, 0).unwrap();
        assert!(!inj
            .blueprint
            .field
            .powered(inj.attacker.unwrap().distance_cm));
    }

    #[test]
    fn close_attacker_on_open_pack_is_not_blocked() {
        let mut bp = system();
        bp.sealed = false;
        let scenario = ThreatScenario {
            id: ThreatId::T4,
            injection: Injection::RemoteAttacker { distance_cm: 1.0 },
            target_asset: Asset::A1,
        };
        let r = run_scenario(&scenario, &bp, 0).unwrap();
        assert!(!r.blocked);
        bp.sealed = true;
        let r = run_scenario(&scenario, &bp, 0).unwrap();
        assert_eq!(r.blocking_countermeasure, Some(Countermeasure::C2));
    }

    #[test]
    fn injection_json_rejects_unknown_kind() {
        let err = serde_json::from_str::<Injection>(r#"{"kind":"laser_glitch"}"#);
        assert!(err.is_err());
        let ok: Injection = serde_json::from_str(r#"{"kind":"remote_attacker"}"#).unwrap();
        assert_eq!(ok, Injection::RemoteAttacker { distance_cm: 50.0 });
    }
}
