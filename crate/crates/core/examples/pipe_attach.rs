//! Wraps the arm around pipes of several sizes and checks attachment.
//!
//! Run with `cargo run --example pipe_attach`.

use softarm::adapt::{attach_check, contact_pressure, wrap_geometry, PipeSpec};
use softarm::beam::ArmGeometry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let geometry = ArmGeometry::with_table_folds(1.1226e-7, 0.02, 0.0, 0.83, 0.15)?;
    let (tendon_force, width) = (10.0, 0.03);

    println!("diameter_m  coverage  max_gap_m  pressure  attached(6%)  attached(16%)");
    for d in [0.06, 0.1, 0.2, 0.4] {
        let pipe = PipeSpec::new(d)?;
        let wrap = wrap_geometry(&geometry, &pipe)?;
        let p = contact_pressure(tendon_force, width, wrap.contact_arc_length(&pipe))?;
        println!(
            "{d:>10.2}  {:>8.3}  {:>9.5}  {p:>8.1}  {:>12}  {:>13}",
            wrap.coverage_ratio,
            wrap.max_gap,
            attach_check(6.0, p).attached,
            attach_check(16.0, p).attached
        );
    }

    match PipeSpec::new(0.05).map(|pipe| wrap_geometry(&geometry, &pipe)) {
        Ok(Err(e)) | Err(e) => println!("0.05 m pipe: {e}"),
        Ok(Ok(_)) => println!("0.05 m pipe fits"),
    }
    Ok(())
}
