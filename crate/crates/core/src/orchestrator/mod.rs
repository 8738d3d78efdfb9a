//! Drives the initialization and monitoring lifecycle on a virtual clock.
//!
//! A [`Simulation`] owns one link bus, the battery modules behind it and the
//! verifier configuration. Nothing inside is shared, so independent
//! simulations can run on separate threads.

mod clock;
mod report;
mod timings;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use clock::{ms_to_us, us_to_ms, SimClock};
pub use report::{
    FieldLost, InitOutcome, InitReport, InitStep, MonitorReport, Sample, StepOutcome, StepRecord,
};
pub use timings::{
    DurationSampler, PhaseTimings, AUTH_MS, ENERGY_CHECK_MS, MEASUREMENT_MS, NTAG_INIT_MS,
    SENSOR_INIT_MS,
};

use crate::auth::{
    authenticate, AuthOutcome, AuthVerdict, OriginalitySignature, TagUid, VerifierConfig,
};
use crate::battery::{bcc_collect, BatteryModule};
use crate::error::Error;
use crate::link::{decode_energy_status, LinkBus, LinkCommand, LinkStatus};

/// What a tag has already been through. All-or-nothing: a partial cache
/// forces a full re-initialization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCache {
    pub authenticated: bool,
    pub configured: bool,
    pub sensor_ready: bool,
    #[serde(skip)]
    power_epoch: u64,
}

impl SessionCache {
    pub fn is_complete(&self) -> bool {
        self.authenticated && self.configured && self.sensor_ready
    }

    pub fn clear(&mut self) {
        *self = SessionCache::default();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TopologyEvent {
    MoveTag { uid: TagUid, distance_cm: f64 },
}

pub struct Simulation {
    bus: LinkBus,
    modules: Vec<BatteryModule>,
    verifier: VerifierConfig,
    timings: PhaseTimings,
    sampler: DurationSampler,
    clock: SimClock,
    caches: BTreeMap<TagUid, SessionCache>,
    auth_log: Vec<(TagUid, AuthOutcome)>,
    events: BTreeMap<(u64, u64), TopologyEvent>,
    event_seq: u64,
    discovered: Vec<TagUid>,
}

impl Simulation {
    pub fn new(
        bus: LinkBus,
        modules: Vec<BatteryModule>,
        verifier: VerifierConfig,
        timings: PhaseTimings,
    ) -> Result<Self, Error> {
        timings.validate()?;
        Ok(Simulation {
            bus,
            modules,
            verifier,
            sampler: DurationSampler::new(timings.jitter_fraction, timings.seed),
            timings,
            clock: SimClock::new(),
            caches: BTreeMap::new(),
            auth_log: Vec::new(),
            events: BTreeMap::new(),
            event_seq: 0,
            discovered: Vec::new(),
        })
    }

    pub fn bus(&self) -> &LinkBus {
        &self.bus
    }

    pub fn bus_mut(&mut self) -> &mut LinkBus {
        &mut self.bus
    }

    pub fn modules(&self) -> &[BatteryModule] {
        &self.modules
    }

    pub fn verifier(&self) -> &VerifierConfig {
        &self.verifier
    }

    pub fn timings(&self) -> &PhaseTimings {
        &self.timings
    }

    pub fn clock(&self) -> SimClock {
        self.clock
    }

    pub fn now_ms(&self) -> f64 {
        self.clock.now_ms()
    }

    pub fn discovered(&self) -> &[TagUid] {
        &self.discovered
    }

    pub fn auth_log(&self) -> &[(TagUid, AuthOutcome)] {
        &self.auth_log
    }

    pub fn cache(&self, uid: &TagUid) -> SessionCache {
        self.caches.get(uid).copied().unwrap_or_default()
    }

    pub fn module_for(&self, uid: &TagUid) -> Option<&BatteryModule> {
        self.modules.iter().find(|m| m.tag_uid == *uid)
    }

    /// Runs the reader's discovery loop at the current virtual time.
    pub fn discover(&mut self) -> Vec<TagUid> {
        self.apply_due_events();
        self.sync_bus_time();
        self.discovered = self.bus.discovery_loop();
        log::debug!("discovered {} tag(s)", self.discovered.len());
        self.discovered.clone()
    }

    /// Moves a tag now. Leaving the field clears its session cache.
    pub fn set_tag_distance(&mut self, uid: &TagUid, distance_cm: f64) -> Result<(), Error> {
        self.bus.set_distance(uid, distance_cm)?;
        if !self.bus.is_powered(uid) {
            if let Some(c) = self.caches.get_mut(uid) {
                c.clear();
            }
        }
        Ok(())
    }

    /// Queues a tag move to take effect once virtual time reaches `at_ms`.
    pub fn schedule_distance_change(&mut self, at_ms: f64, uid: TagUid, distance_cm: f64) {
        let key = (ms_to_us(at_ms), self.event_seq);
        self.event_seq += 1;
        self.events
            .insert(key, TopologyEvent::MoveTag { uid, distance_cm });
    }

    fn apply_due_events(&mut self) {
        let now = self.clock.now_us();
        while let Some(entry) = self.events.first_entry() {
            if entry.key().0 > now {
                break;
            }
            match entry.remove() {
                TopologyEvent::MoveTag { uid, distance_cm } => {
                    log::debug!("t={} ms: moving {uid} to {distance_cm} cm", self.now_ms());
                    if let Err(e) = self.set_tag_distance(&uid, distance_cm) {
                        log::warn!("scheduled move of {uid} failed: {e}");
                    }
                }
            }
        }
    }

    fn sync_bus_time(&mut self) {
        self.bus.set_time_us(self.clock.now_us());
    }

    /// Runs one step: commands issue at the step's start time, then the clock
    /// advances by the realized duration whatever the outcome.
    fn timed_step<F>(&mut self, step: InitStep, nominal_ms: f64, body: F) -> StepRecord
    where
        F: FnOnce(&mut Self) -> (StepOutcome, Option<String>),
    {
        self.apply_due_events();
        self.sync_bus_time();
        let start_ms = self.clock.now_ms();
        let (outcome, note) = body(self);
        let duration_us = self.sampler.realize_us(nominal_ms);
        self.clock.advance_us(duration_us);
        StepRecord {
            step,
            start_ms,
            duration_ms: us_to_ms(duration_us),
            outcome,
            note,
        }
    }

    /// Full initialization of one discovered tag.
    pub fn run_initialization(&mut self, uid: &TagUid) -> Result<InitReport, Error> {
        if !self.discovered.contains(uid) {
            return Err(Error::NoTag(uid.to_hex()));
        }
        let started_us = self.clock.now_us();
        self.caches.entry(*uid).or_default().clear();
        let uid = *uid;
        let mut steps = Vec::with_capacity(4);
        let t = self.timings;

        let mut auth_result = None;
        let record = self.timed_step(InitStep::Authentication, t.auth_ms, |sim| {
            match sim.read_signature(&uid) {
                Err(status) => (StepOutcome::LinkFailure { status }, None),
                Ok(sig) => {
                    let outcome = authenticate(&sim.verifier, &uid, &sig);
                    let verdict = outcome.verdict;
                    auth_result = Some(outcome);
                    let note = Some(
                        "request, tag response and verification; verification dominates".into(),
                    );
                    if verdict == AuthVerdict::Accepted {
                        (StepOutcome::Ok, note)
                    } else {
                        (
                            StepOutcome::Rejected {
                                reason: format!("{verdict:?}"),
                            },
                            note,
                        )
                    }
                }
            }
        });
        if let Some(mut outcome) = auth_result {
            outcome.elapsed_ms = record.duration_ms;
            self.auth_log.push((uid, outcome));
        }
        let auth_ok = record.outcome.is_ok();
        let link_lost = matches!(record.outcome, StepOutcome::LinkFailure { .. });
        steps.push(record);
        if !auth_ok {
            let final_outcome = if link_lost {
                InitOutcome::AbortedPower
            } else {
                InitOutcome::AbortedAuth
            };
            return Ok(self.finish_init(uid, steps, final_outcome, started_us));
        }
        self.caches.entry(uid).or_default().authenticated = true;

        let record = self.timed_step(InitStep::EnergyCheck, t.energy_check_ms, |sim| {
            let resp = sim.bus.transceive(LinkCommand::GetEnergyStatus);
            match resp.into_result().map(|p| decode_energy_status(&p)) {
                Ok(Some((true, strength))) => (
                    StepOutcome::Ok,
                    Some(format!("field strength {strength:.4}")),
                ),
                Ok(_) => (
                    StepOutcome::LinkFailure {
                        status: LinkStatus::NotPowered,
                    },
                    None,
                ),
                Err(status) => (StepOutcome::LinkFailure { status }, None),
            }
        });
        let ok = record.outcome.is_ok();
        steps.push(record);
        if !ok {
            return Ok(self.finish_init(uid, steps, InitOutcome::AbortedPower, started_us));
        }

        let record = self.timed_step(InitStep::NtagInit, t.ntag_init_ms, |sim| {
            match sim.bus.transceive(LinkCommand::ConfigureTag).into_result() {
                Ok(_) => (StepOutcome::Ok, None),
                Err(status) => (StepOutcome::LinkFailure { status }, None),
            }
        });
        let ok = record.outcome.is_ok();
        steps.push(record);
        if !ok {
            return Ok(self.finish_init(uid, steps, InitOutcome::AbortedPower, started_us));
        }
        self.caches.entry(uid).or_default().configured = true;

        let record = self.timed_step(InitStep::SensorInit, t.sensor_init_ms, |sim| {
            match sim.bus.initialize_sensor().into_result() {
                Ok(_) => (StepOutcome::Ok, None),
                Err(status) => (StepOutcome::LinkFailure { status }, None),
            }
        });
        let outcome = record.outcome.clone();
        steps.push(record);
        let final_outcome = match outcome {
            StepOutcome::Ok => {
                self.caches.entry(uid).or_default().sensor_ready = true;
                InitOutcome::Succeeded
            }
            StepOutcome::LinkFailure {
                status: LinkStatus::NotPowered,
            } => InitOutcome::AbortedPower,
            _ => InitOutcome::AbortedSensor,
        };
        Ok(self.finish_init(uid, steps, final_outcome, started_us))
    }

    fn read_signature(&mut self, uid: &TagUid) -> Result<OriginalitySignature, LinkStatus> {
        self.bus
            .transceive(LinkCommand::Select(*uid))
            .into_result()?;
        let payload = self
            .bus
            .transceive(LinkCommand::ReadSignature)
            .into_result()?;
        let bytes: [u8; 32] = payload.try_into().map_err(|_| LinkStatus::BadIndex)?;
        Ok(OriginalitySignature(bytes))
    }

    fn finish_init(
        &mut self,
        uid: TagUid,
        steps: Vec<StepRecord>,
        final_outcome: InitOutcome,
        started_us: u64,
    ) -> InitReport {
        let cache = self.caches.entry(uid).or_default();
        if final_outcome == InitOutcome::Succeeded {
            cache.power_epoch = self.bus.power_epoch(&uid).unwrap_or(0);
        } else {
            cache.clear();
        }
        log::info!("init {uid}: {final_outcome:?}");
        InitReport {
            uid,
            steps,
            final_outcome,
            elapsed_ms: us_to_ms(self.clock.now_us() - started_us),
            resumed: false,
        }
    }

    /// Reuses a complete, still-valid session without running any step;
    /// otherwise falls back to full initialization.
    pub fn resume_session(&mut self, uid: &TagUid) -> Result<InitReport, Error> {
        self.apply_due_events();
        if self.session_valid(uid) {
            log::info!("resume {uid}: cached session reused");
            return Ok(InitReport {
                uid: *uid,
                steps: Vec::new(),
                final_outcome: InitOutcome::Succeeded,
                elapsed_ms: 0.0,
                resumed: true,
            });
        }
        if let Some(c) = self.caches.get_mut(uid) {
            c.clear();
        }
        self.run_initialization(uid)
    }

    fn session_valid(&self, uid: &TagUid) -> bool {
        let cache = self.cache(uid);
        cache.is_complete()
            && self.bus.is_powered(uid)
            && self.bus.power_epoch(uid) == Some(cache.power_epoch)
    }

    /// Repeated sensor readout; each sample is a real ReadSensor exchange.
    pub fn run_monitoring(
        &mut self,
        uid: &TagUid,
        n_samples: usize,
    ) -> Result<MonitorReport, Error> {
        if !self.cache(uid).is_complete() {
            return Err(Error::SessionNotReady(uid.to_hex()));
        }
        let module = self
            .module_for(uid)
            .cloned()
            .ok_or_else(|| Error::NoTag(uid.to_hex()))?;
        let started_us = self.clock.now_us();
        let mut samples = Vec::with_capacity(n_samples);
        let mut field_lost = None;

        for i in 0..n_samples {
            self.apply_due_events();
            self.sync_bus_time();
            match bcc_collect(&mut self.bus, &module, AuthVerdict::Accepted) {
                Ok(status) => {
                    samples.push(Sample {
                        timestamp_ms: self.clock.now_ms(),
                        status,
                    });
                    let d = self.sampler.realize_us(self.timings.measurement_ms);
                    self.clock.advance_us(d);
                }
                Err(status) => {
                    log::warn!("monitoring {uid}: sample {i} failed with {status:?}");
                    field_lost = Some(FieldLost {
                        after_samples: i,
                        at_ms: self.clock.now_ms(),
                        status,
                    });
                    if let Some(c) = self.caches.get_mut(uid) {
                        c.clear();
                    }
                    break;
                }
            }
        }

        Ok(MonitorReport {
            uid: *uid,
            samples,
            per_sample_ms: self.timings.measurement_ms,
            elapsed_ms: us_to_ms(self.clock.now_us() - started_us),
            field_lost,
        })
    }
}
