use serde::{Deserialize, Serialize};

use crate::auth::{OriginalitySignature, TagUid};
use crate::battery::TemperatureSensor;

pub const BLOCK_SIZE: usize = 4;
pub const DEFAULT_BLOCK_COUNT: usize = 16;

pub type Block = [u8; BLOCK_SIZE];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TagState {
    Unpowered,
    Idle,
    Selected,
    Configured,
}

/// Passive NFC tag. The originality signature sits in a region that link
/// commands can read but have no way to address for writing.
#[derive(Debug, Clone)]
pub struct NfcTagDevice {
    uid: TagUid,
    signature: OriginalitySignature,
    blocks: Vec<Block>,
    locked: Vec<bool>,
    state: TagState,
    sensor: Option<TemperatureSensor>,
}

impl NfcTagDevice {
    pub fn new(uid: TagUid, signature: OriginalitySignature) -> Self {
        Self::with_blocks(uid, signature, vec![[0; BLOCK_SIZE]; DEFAULT_BLOCK_COUNT])
    }

    pub fn with_blocks(uid: TagUid, signature: OriginalitySignature, blocks: Vec<Block>) -> Self {
        let locked = vec![false; blocks.len()];
        NfcTagDevice {
            uid,
            signature,
            blocks,
            locked,
            state: TagState::Unpowered,
            sensor: None,
        }
    }

    pub fn attach_sensor(mut self, sensor: TemperatureSensor) -> Self {
        self.sensor = Some(sensor);
        self
    }

    /// Marks a user block read-only. Out-of-range indices are ignored.
    pub fn lock_block(mut self, index: usize) -> Self {
        if let Some(l) = self.locked.get_mut(index) {
            *l = true;
        }
        self
    }

    pub fn uid(&self) -> TagUid {
        self.uid
    }

    pub fn signature(&self) -> &OriginalitySignature {
        &self.signature
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn state(&self) -> TagState {
        self.state
    }

    pub fn sensor(&self) -> Option<&TemperatureSensor> {
        self.sensor.as_ref()
    }

    pub(crate) fn sensor_mut(&mut self) -> Option<&mut TemperatureSensor> {
        self.sensor.as_mut()
    }

    pub(crate) fn wake(&mut self) {
        if self.state == TagState::Unpowered {
            self.state = TagState::Idle;
        }
    }

    pub(crate) fn power_down(&mut self) {
        self.state = TagState::Unpowered;
        if let Some(sensor) = self.sensor.as_mut() {
            sensor.reset();
        }
    }

    pub(crate) fn select(&mut self) {
        self.wake();
        if self.state == TagState::Idle {
            self.state = TagState::Selected;
        }
    }

    pub(crate) fn deselect(&mut self) {
        if self.state == TagState::Selected {
            self.state = TagState::Idle;
        }
    }

    pub(crate) fn configure(&mut self) -> bool {
        match self.state {
            TagState::Selected | TagState::Configured => {
                self.state = TagState::Configured;
                true
            }
            _ => false,
        }
    }

    pub(crate) fn read_block(&self, index: usize) -> Option<Block> {
        self.blocks.get(index).copied()
    }

    pub(crate) fn write_block(&mut self, index: usize, data: Block) -> Result<(), WriteFault> {
        match (self.blocks.get_mut(index), self.locked.get(index)) {
            (None, _) | (_, None) => Err(WriteFault::BadIndex),
            (Some(_), Some(true)) => Err(WriteFault::Locked),
            (Some(block), Some(false)) => {
                *block = data;
                Ok(())
            }
        }
    }
}

pub(crate) enum WriteFault {
    BadIndex,
    Locked,
}
