// Raw link traffic: discovery, selection, block access and the read-only
// signature region.

use nfc_bms::auth::{OriginalitySignature, TagUid};
use nfc_bms::link::{FieldModel, LinkBus, LinkCommand, NfcTagDevice};

pub fn run_example() -> nfc_bms::Result<()> {
    let mut bus = LinkBus::new(FieldModel::default());
    let near = TagUid::from_serial([4, 0, 0, 0, 0, 0, 1]);
    let far = TagUid::from_serial([4, 0, 0, 0, 0, 0, 2]);
    bus.attach(
        NfcTagDevice::new(near, OriginalitySignature([0x11; 32])),
        2.0,
    )?;
    bus.attach(
        NfcTagDevice::new(far, OriginalitySignature([0x22; 32])),
        7.5,
    )?;

    println!("discovered: {:?}", bus.discovery_loop());
    for cmd in [
        LinkCommand::Select(near),
        LinkCommand::WriteBlock(3, *b"BMS1"),
        LinkCommand::ReadBlock(3),
        LinkCommand::ReadSignature,
        LinkCommand::Select(far),
    ] {
        let label = cmd.to_string();
        let resp = bus.transceive(cmd);
        println!(
            "{label:<24} -> {:?} {}",
            resp.status,
            hex::encode_upper(&resp.payload)
        );
    }

    bus.set_distance(&far, 3.0)?;
    println!("after moving {far} closer: {:?}", bus.discovery_loop());
    for entry in bus.trace() {
        println!("  {entry}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
