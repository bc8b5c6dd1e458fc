//! Propeller efficiency versus rpm and motor placement.
//!
//! Run with `cargo run --example efficiency`.

use softarm::aero::{net_vertical_thrust, EfficiencyModel, PropellerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = EfficiencyModel::paper();
    let prop = PropellerModel::calibrated(4000.0, 4.905)?;

    for rpm in [4000.0, 4500.0, 5000.0] {
        let eta = model.table().lookup(rpm);
        let best = model.optimum_station(rpm);
        let thrust = prop.thrust_coefficient * rpm * rpm;
        println!("{rpm:>6} rpm  eta {eta:.3}  best station {best:.2}  thrust {thrust:.3} N");
    }

    println!("\nstation  eta(4000 rpm)");
    for k in 0..=7 {
        let x = 0.3 + 0.1 * k as f64;
        println!("{x:>7.2}  {:.4}", model.eval(x, 4000.0)?);
    }

    for angle in [0.0, 10.0, 20.0] {
        println!("arm {angle:>4} deg  net lift {:.3} N", net_vertical_thrust(4.905, angle, 0.895)?);
    }
    Ok(())
}
