//! JSON file schemas: scenario config, key file, allowlist, tag image.
//!
//! Paths inside a scenario config are resolved relative to the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::auth::{AllowList, KeyFile, OriginalitySignature, TagUid};
use crate::battery::DEFAULT_ALARM_THRESHOLD_DC;
use crate::error::Error;
use crate::link::{Block, FieldModel, DEFAULT_BLOCK_COUNT};
use crate::orchestrator::PhaseTimings;
use crate::system::{ModuleSetup, SystemBlueprint, TagSetup};
use crate::threat::ThreatScenario;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    fs::write(path, to_json_string(value)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// What `provision` writes for one tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagImage {
    pub uid: TagUid,
    pub signature: OriginalitySignature,
    pub blocks: Vec<String>,
}

impl TagImage {
    pub fn new(uid: TagUid, signature: OriginalitySignature, blocks: &[Block]) -> Self {
        TagImage {
            uid,
            signature,
            blocks: blocks.iter().map(hex::encode_upper).collect(),
        }
    }

    pub fn decode_blocks(&self) -> Result<Vec<Block>, Error> {
        decode_blocks(&self.blocks)
    }
}

fn decode_blocks(blocks: &[String]) -> Result<Vec<Block>, Error> {
    blocks
        .iter()
        .map(|b| {
            let raw = hex::decode(b).map_err(|e| Error::Hex {
                field: "blocks".into(),
                reason: e.to_string(),
            })?;
            raw.try_into().map_err(|_| Error::Hex {
                field: "blocks".into(),
                reason: format!("block {b:?} is not 4 bytes"),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagConfig {
    /// Tag image written by `provision`. Mutually exclusive with inline fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uid: Option<TagUid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<OriginalitySignature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<String>>,
    pub distance_cm: f64,
    pub module: ModuleSetup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    #[serde(default)]
    pub field: FieldModel,
    pub tags: Vec<TagConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecurityConfig {
    pub key_file: PathBuf,
    pub allowlist_file: PathBuf,
    #[serde(default = "default_true")]
    pub sealed: bool,
}

fn default_true() -> bool {
    true
}

fn default_threshold() -> i16 {
    DEFAULT_ALARM_THRESHOLD_DC
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: TopologyConfig,
    #[serde(default)]
    pub timings: PhaseTimings,
    pub security: SecurityConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threat: Option<ThreatScenario>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub alarm_threshold_dc: i16,
}

/// A config with every referenced file read and checked.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub blueprint: SystemBlueprint,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        read_json(path)
    }

    /// Resolves files relative to `base_dir` and builds the system blueprint.
    /// `seed_override` replaces both the top-level and the timing seed.
    pub fn resolve(
        &self,
        base_dir: &Path,
        seed_override: Option<u64>,
    ) -> Result<LoadedScenario, Error> {
        let seed = seed_override.unwrap_or(self.seed);
        let mut timings = self.timings;
        if let Some(s) = seed_override {
            timings.seed = s;
        }
        timings.validate()?;
        let field = FieldModel::new(
            self.topology.field.d_max_cm,
            self.topology.field.coupling_exponent,
        )?;

        let key_file: KeyFile = read_json(&base_dir.join(&self.security.key_file))?;
        let public_key = key_file.public_key()?;
        let allowlist: AllowList = read_json(&base_dir.join(&self.security.allowlist_file))?;

        let mut tags = Vec::with_capacity(self.topology.tags.len());
        for (i, tc) in self.topology.tags.iter().enumerate() {
            let (uid, signature, blocks) = match (&tc.image, tc.uid, tc.signature) {
                (Some(image), None, None) if tc.blocks.is_none() => {
                    let img: TagImage = read_json(&base_dir.join(image))?;
                    let blocks = img.decode_blocks()?;
                    (img.uid, img.signature, blocks)
                }
                (None, Some(uid), Some(sig)) => {
                    let blocks = match &tc.blocks {
                        Some(b) => decode_blocks(b)?,
                        None => vec![[0; 4]; DEFAULT_BLOCK_COUNT],
                    };
                    (uid, sig, blocks)
                }
                _ => {
                    return Err(Error::Config(format!(
                        "tag #{i}: give either `image` or both `uid` and `signature`"
                    )))
                }
            };
            if tags.iter().any(|t: &TagSetup| t.uid == uid) {
                return Err(Error::Config(format!("duplicate tag UID {uid}")));
            }
            if !(tc.distance_cm.is_finite() && tc.distance_cm >= 0.0) {
                return Err(Error::NegativeDistance(tc.distance_cm));
            }
            tc.module.voltage_profile.validate()?;
            tags.push(TagSetup {
                uid,
                signature,
                blocks,
                distance_cm: tc.distance_cm,
                module: tc.module.clone(),
            });
        }
        if tags.is_empty() {
            return Err(Error::Config("topology has no tags".into()));
        }
        if let Some(threat) = &self.threat {
            threat.validate()?;
        }

        Ok(LoadedScenario {
            config: self.clone(),
            blueprint: SystemBlueprint {
                field,
                tags,
                public_key,
                allowlist,
                timings,
                sealed: self.security.sealed,
                fault: None,
                alarm_threshold_dc: self.alarm_threshold_dc,
            },
            seed,
        })
    }
}

/// Loads and resolves a config file in one go.
pub fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<LoadedScenario, Error> {
    let config = ScenarioConfig::load(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.resolve(base, seed_override)
}
