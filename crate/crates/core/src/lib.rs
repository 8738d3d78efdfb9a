//! Simulator for NFC-based battery sensor readout in a modular BMS.
//!
//! A reader on the cell control board talks to passive tags on battery
//! modules. Before a module's sensor data is trusted, the reader checks the
//! tag UID against an allowlist and verifies the tag's ECDSA (secp128r1)
//! originality signature. Everything runs on a virtual clock so timings and
//! reports are reproducible.
//!
//! - [`ec`]: field, curve and ECDSA arithmetic
//! - [`auth`]: provisioning and the allowlist-then-signature check
//! - [`link`]: field model, tag/reader state machines, the link bus
//! - [`battery`]: cells, temperature sensor, BCC aggregation
//! - [`orchestrator`]: initialization and monitoring phases, session cache
//! - [`threat`]: threat scenarios and countermeasure classification
//! - [`config`] and [`cli`]: file formats and the batch command layer

pub mod auth;
pub mod battery;
pub mod cli;
pub mod config;
pub mod ec;
pub mod error;
pub mod link;
pub mod orchestrator;
pub mod system;
pub mod threat;

pub use error::{CryptoError, Error, Result};
