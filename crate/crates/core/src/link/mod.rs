//! Reader/writer-mode NFC link: field model, tag and reader state machines,
//! and the bus that joins them.

mod bus;
mod field;
mod tag;

pub use bus::{
    decode_energy_status, decode_temperature, FaultTarget, LinkBus, LinkCommand, LinkResponse,
    LinkStatus, NfcReaderDevice, PayloadFault, ReaderState, TraceEntry,
};
pub use field::{FieldModel, DEFAULT_COUPLING_EXPONENT, DEFAULT_D_MAX_CM};
pub use tag::{Block, NfcTagDevice, TagState, BLOCK_SIZE, DEFAULT_BLOCK_COUNT};
