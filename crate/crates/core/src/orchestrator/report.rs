use serde::{Deserialize, Serialize};

use crate::auth::TagUid;
use crate::battery::ModuleStatus;
use crate::link::LinkStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitStep {
    Authentication,
    EnergyCheck,
    NtagInit,
    SensorInit,
}

impl InitStep {
    pub const ORDER: [InitStep; 4] = [
        InitStep::Authentication,
        InitStep::EnergyCheck,
        InitStep::NtagInit,
        InitStep::SensorInit,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum StepOutcome {
    Ok,
    Rejected { reason: String },
    LinkFailure { status: LinkStatus },
}

impl StepOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, StepOutcome::Ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: InitStep,
    pub start_ms: f64,
    pub duration_ms: f64,
    pub outcome: StepOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitOutcome {
    Succeeded,
    AbortedAuth,
    AbortedPower,
    AbortedSensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitReport {
    pub uid: TagUid,
    pub steps: Vec<StepRecord>,
    #[serde(rename = "final")]
    pub final_outcome: InitOutcome,
    pub elapsed_ms: f64,
    /// True when the cached session was reused and no step ran.
    pub resumed: bool,
}

impl InitReport {
    pub fn succeeded(&self) -> bool {
        self.final_outcome == InitOutcome::Succeeded
    }

    pub fn step(&self, step: InitStep) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.step == step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub timestamp_ms: f64,
    pub status: ModuleStatus,
}

/// Marks a monitoring run cut short because the tag dropped off the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldLost {
    pub after_samples: usize,
    pub at_ms: f64,
    pub status: LinkStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub uid: TagUid,
    pub samples: Vec<Sample>,
    pub per_sample_ms: f64,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_lost: Option<FieldLost>,
}

impl MonitorReport {
    pub fn complete(&self) -> bool {
        self.field_lost.is_none()
    }
}
