use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::FieldModel;
use super::tag::{Block, NfcTagDevice, TagState, WriteFault};
use crate::auth::TagUid;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkCommand {
    Inventory,
    Select(TagUid),
    ReadBlock(usize),
    WriteBlock(usize, Block),
    ReadSignature,
    GetEnergyStatus,
    ConfigureTag,
    ReadSensor,
}

impl LinkCommand {
    fn needs_selection(&self) -> bool {
        !matches!(self, LinkCommand::Inventory | LinkCommand::Select(_))
    }
}

impl fmt::Display for LinkCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkCommand::Inventory => f.write_str("Inventory"),
            LinkCommand::Select(uid) => write!(f, "Select({uid})"),
            LinkCommand::ReadBlock(i) => write!(f, "ReadBlock({i})"),
            LinkCommand::WriteBlock(i, data) => {
                write!(f, "WriteBlock({i}, {})", hex::encode_upper(data))
            }
            LinkCommand::ReadSignature => f.write_str("ReadSignature"),
            LinkCommand::GetEnergyStatus => f.write_str("GetEnergyStatus"),
            LinkCommand::ConfigureTag => f.write_str("ConfigureTag"),
            LinkCommand::ReadSensor => f.write_str("ReadSensor"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkStatus {
    Ok,
    NoTag,
    NotPowered,
    NotSelected,
    /// Tag is selected but has not been configured, or its sensor is not ready.
    NotConfigured,
    Protected,
    BadIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkResponse {
    pub status: LinkStatus,
    pub payload: Vec<u8>,
}

impl LinkResponse {
    fn ok(payload: Vec<u8>) -> Self {
        LinkResponse {
            status: LinkStatus::Ok,
            payload,
        }
    }

    fn err(status: LinkStatus) -> Self {
        LinkResponse {
            status,
            payload: Vec::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == LinkStatus::Ok
    }

    pub fn into_result(self) -> Result<Vec<u8>, LinkStatus> {
        match self.status {
            LinkStatus::Ok => Ok(self.payload),
            other => Err(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReaderState {
    Idle,
    Discovering,
    Connected,
}

/// Active reader endpoint. Owned by a [`LinkBus`].
#[derive(Debug, Clone)]
pub struct NfcReaderDevice {
    state: ReaderState,
    selected: Option<TagUid>,
}

impl Default for NfcReaderDevice {
    fn default() -> Self {
        NfcReaderDevice {
            state: ReaderState::Idle,
            selected: None,
        }
    }
}

impl NfcReaderDevice {
    pub fn state(&self) -> ReaderState {
        self.state
    }

    pub fn selected_uid(&self) -> Option<TagUid> {
        self.selected
    }

    fn disconnect(&mut self) {
        self.state = ReaderState::Idle;
        self.selected = None;
    }
}

/// Which response a [`PayloadFault`] corrupts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultTarget {
    ReadSignature,
    ReadSensor,
    ReadBlock,
}

/// XORs one payload byte of every matching response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadFault {
    pub target: FaultTarget,
    pub byte_index: usize,
    pub xor_mask: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub t_ms: f64,
    pub command: String,
    pub status: LinkStatus,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:>10.3} ms] {} -> {:?}",
            self.t_ms, self.command, self.status
        )
    }
}

#[derive(Debug, Clone)]
struct Placement {
    tag: NfcTagDevice,
    distance_cm: f64,
    power_epoch: u64,
}

/// One reader and the tags in its field. Single-threaded by construction;
/// separate buses are independent simulation domains.
#[derive(Debug, Clone)]
pub struct LinkBus {
    field: FieldModel,
    reader: NfcReaderDevice,
    tags: BTreeMap<TagUid, Placement>,
    now_us: u64,
    fault: Option<PayloadFault>,
    trace: Vec<TraceEntry>,
}

impl LinkBus {
    pub fn new(field: FieldModel) -> Self {
        LinkBus {
            field,
            reader: NfcReaderDevice::default(),
            tags: BTreeMap::new(),
            now_us: 0,
            fault: None,
            trace: Vec::new(),
        }
    }

    pub fn field(&self) -> &FieldModel {
        &self.field
    }

    pub fn reader(&self) -> &NfcReaderDevice {
        &self.reader
    }

    /// Places a tag. A tag with the same UID is replaced.
    pub fn attach(&mut self, mut tag: NfcTagDevice, distance_cm: f64) -> Result<(), Error> {
        if !(distance_cm.is_finite() && distance_cm >= 0.0) {
            return Err(Error::NegativeDistance(distance_cm));
        }
        tag.power_down();
        let uid = tag.uid();
        if self.reader.selected == Some(uid) {
            self.reader.disconnect();
        }
        self.tags.insert(
            uid,
            Placement {
                tag,
                distance_cm,
                power_epoch: 0,
            },
        );
        Ok(())
    }

    pub fn detach(&mut self, uid: &TagUid) -> Option<NfcTagDevice> {
        if self.reader.selected == Some(*uid) {
            self.reader.disconnect();
        }
        self.tags.remove(uid).map(|p| p.tag)
    }

    pub fn tag(&self, uid: &TagUid) -> Option<&NfcTagDevice> {
        self.tags.get(uid).map(|p| &p.tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &NfcTagDevice> {
        self.tags.values().map(|p| &p.tag)
    }

    pub fn distance(&self, uid: &TagUid) -> Option<f64> {
        self.tags.get(uid).map(|p| p.distance_cm)
    }

    pub fn is_powered(&self, uid: &TagUid) -> bool {
        self.tags
            .get(uid)
            .is_some_and(|p| self.field.powered(p.distance_cm))
    }

    /// Counts how many times the tag has lost the field since it was attached.
    pub fn power_epoch(&self, uid: &TagUid) -> Option<u64> {
        self.tags.get(uid).map(|p| p.power_epoch)
    }

    /// Moves a tag. Leaving the field powers it down and drops the reader's
    /// connection to it.
    pub fn set_distance(&mut self, uid: &TagUid, distance_cm: f64) -> Result<(), Error> {
        if !(distance_cm.is_finite() && distance_cm >= 0.0) {
            return Err(Error::NegativeDistance(distance_cm));
        }
        let field = self.field;
        let placement = self
            .tags
            .get_mut(uid)
            .ok_or_else(|| Error::NoTag(uid.to_hex()))?;
        let was_powered = field.powered(placement.distance_cm);
        placement.distance_cm = distance_cm;
        if !field.powered(distance_cm) {
            if was_powered || placement.tag.state() != TagState::Unpowered {
                placement.power_epoch += 1;
            }
            placement.tag.power_down();
            if self.reader.selected == Some(*uid) {
                self.reader.disconnect();
            }
        }
        Ok(())
    }

    pub fn set_time_us(&mut self, now_us: u64) {
        self.now_us = self.now_us.max(now_us);
    }

    pub fn now_ms(&self) -> f64 {
        self.now_us as f64 / 1000.0
    }

    pub fn set_fault(&mut self, fault: Option<PayloadFault>) {
        self.fault = fault;
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// Inventories all powered tags, waking them, in ascending UID order.
    pub fn discovery_loop(&mut self) -> Vec<TagUid> {
        if let Some(prev) = self.reader.selected {
            if let Some(p) = self.tags.get_mut(&prev) {
                p.tag.deselect();
            }
        }
        self.reader.state = ReaderState::Discovering;
        self.reader.selected = None;
        let resp = self.transceive(LinkCommand::Inventory);
        self.reader.state = ReaderState::Idle;
        resp.payload
            .chunks_exact(8)
            .filter_map(|c| TagUid::new(c.try_into().expect("chunk of 8")).ok())
            .collect()
    }

    pub fn transceive(&mut self, cmd: LinkCommand) -> LinkResponse {
        let label = cmd.to_string();
        let mut resp = self.execute(cmd.clone());
        if resp.is_ok() {
            self.apply_fault(&cmd, &mut resp);
        }
        log::trace!("{:.3} ms {} -> {:?}", self.now_ms(), label, resp.status);
        self.trace.push(TraceEntry {
            t_ms: self.now_ms(),
            command: label,
            status: resp.status,
        });
        resp
    }

    /// Runs the tag-side sensor bring-up on the selected, configured tag.
    pub fn initialize_sensor(&mut self) -> LinkResponse {
        let resp = match self.selected_placement() {
            Err(status) => LinkResponse::err(status),
            Ok(p) => {
                if p.tag.state() != TagState::Configured {
                    LinkResponse::err(LinkStatus::NotConfigured)
                } else if let Some(sensor) = p.tag.sensor_mut() {
                    sensor.initialize();
                    LinkResponse::ok(Vec::new())
                } else {
                    LinkResponse::err(LinkStatus::NotConfigured)
                }
            }
        };
        self.trace.push(TraceEntry {
            t_ms: self.now_ms(),
            command: "SensorInit".into(),
            status: resp.status,
        });
        resp
    }

    fn apply_fault(&self, cmd: &LinkCommand, resp: &mut LinkResponse) {
        let Some(fault) = self.fault else { return };
        let hit = matches!(
            (fault.target, cmd),
            (FaultTarget::ReadSignature, LinkCommand::ReadSignature)
                | (FaultTarget::ReadSensor, LinkCommand::ReadSensor)
                | (FaultTarget::ReadBlock, LinkCommand::ReadBlock(_))
        );
        if hit {
            if let Some(b) = resp.payload.get_mut(fault.byte_index) {
                *b ^= fault.xor_mask;
            }
        }
    }

    fn selected_placement(&mut self) -> Result<&mut Placement, LinkStatus> {
        let uid = self.reader.selected.ok_or(LinkStatus::NotSelected)?;
        let field = self.field;
        let Some(p) = self.tags.get_mut(&uid) else {
            self.reader.disconnect();
            return Err(LinkStatus::NoTag);
        };
        if !field.powered(p.distance_cm) {
            p.tag.power_down();
            self.reader.disconnect();
            return Err(LinkStatus::NotPowered);
        }
        if p.tag.state() == TagState::Unpowered {
            self.reader.disconnect();
            return Err(LinkStatus::NotSelected);
        }
        Ok(p)
    }

    fn execute(&mut self, cmd: LinkCommand) -> LinkResponse {
        match cmd {
            LinkCommand::Inventory => {
                let field = self.field;
                let mut payload = Vec::new();
                for (uid, p) in self.tags.iter_mut() {
                    if field.powered(p.distance_cm) {
                        p.tag.wake();
                        payload.extend_from_slice(uid.as_bytes());
                    }
                }
                LinkResponse::ok(payload)
            }
            LinkCommand::Select(uid) => {
                let field = self.field;
                let Some(p) = self.tags.get(&uid) else {
                    return LinkResponse::err(LinkStatus::NoTag);
                };
                if !field.powered(p.distance_cm) {
                    return LinkResponse::err(LinkStatus::NotPowered);
                }
                if let Some(prev) = self.reader.selected.filter(|prev| *prev != uid) {
                    if let Some(pp) = self.tags.get_mut(&prev) {
                        pp.tag.deselect();
                    }
                }
                self.tags.get_mut(&uid).expect("checked above").tag.select();
                self.reader.state = ReaderState::Connected;
                self.reader.selected = Some(uid);
                LinkResponse::ok(Vec::new())
            }
            cmd => {
                debug_assert!(cmd.needs_selection());
                let now_ms = self.now_ms();
                let strength_at =
                    |d: f64, field: &FieldModel| field.field_strength(d).unwrap_or(0.0);
                let field = self.field;
                let p = match self.selected_placement() {
                    Ok(p) => p,
                    Err(status) => return LinkResponse::err(status),
                };
                match cmd {
                    LinkCommand::ReadBlock(i) => match p.tag.read_block(i) {
                        Some(block) => LinkResponse::ok(block.to_vec()),
                        None => LinkResponse::err(LinkStatus::BadIndex),
                    },
                    LinkCommand::WriteBlock(i, data) => match p.tag.write_block(i, data) {
                        Ok(()) => LinkResponse::ok(Vec::new()),
                        Err(WriteFault::BadIndex) => LinkResponse::err(LinkStatus::BadIndex),
                        Err(WriteFault::Locked) => LinkResponse::err(LinkStatus::Protected),
                    },
                    LinkCommand::ReadSignature => LinkResponse::ok(p.tag.signature().0.to_vec()),
                    LinkCommand::GetEnergyStatus => {
                        let strength = strength_at(p.distance_cm, &field);
                        let scaled = (strength * f64::from(u16::MAX)).round() as u16;
                        let mut payload = vec![1u8];
                        payload.extend_from_slice(&scaled.to_be_bytes());
                        LinkResponse::ok(payload)
                    }
                    LinkCommand::ConfigureTag => {
                        if p.tag.configure() {
                            LinkResponse::ok(Vec::new())
                        } else {
                            LinkResponse::err(LinkStatus::NotSelected)
                        }
                    }
                    LinkCommand::ReadSensor => {
                        if p.tag.state() != TagState::Configured {
                            return LinkResponse::err(LinkStatus::NotConfigured);
                        }
                        match p.tag.sensor().map(|s| s.read(now_ms)) {
                            Some(Ok(dc)) => LinkResponse::ok(dc.to_be_bytes().to_vec()),
                            _ => LinkResponse::err(LinkStatus::NotConfigured),
                        }
                    }
                    LinkCommand::Inventory | LinkCommand::Select(_) => unreachable!(),
                }
            }
        }
    }
}

/// Decodes a ReadSensor payload into deci-degrees Celsius.
pub fn decode_temperature(payload: &[u8]) -> Option<i16> {
    let bytes: [u8; 2] = payload.try_into().ok()?;
    Some(i16::from_be_bytes(bytes))
}

/// Decodes a GetEnergyStatus payload into (powered, strength in [0, 1]).
pub fn decode_energy_status(payload: &[u8]) -> Option<(bool, f64)> {
    match payload {
        [flag, hi, lo] => Some((
            *flag == 1,
            f64::from(u16::from_be_bytes([*hi, *lo])) / f64::from(u16::MAX),
        )),
        _ => None,
    }
}
