// Field strength and power state of a passive tag as it moves away from the reader.

use nfc_bms::link::FieldModel;

pub fn run_example() -> nfc_bms::Result<()> {
    let field = FieldModel::default();
    println!("d_max = {} cm", field.d_max_cm);
    println!("{:>8} {:>10} powered", "cm", "strength");
    for tenth in (0..=80).step_by(5) {
        let d = tenth as f64 / 10.0;
        println!(
            "{d:>8.1} {:>10.4} {}",
            field.field_strength(d)?,
            field.powered(d)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
