//! Solves the folded arm under increasing thrust and prints the tip response.
//!
//! Run with `cargo run --example elastica`.

use softarm::beam::{max_stress_station, solve_elastica, ArmGeometry, BeamMaterial, LoadCase, SolverSettings};
use softarm::material::TABLE_MOONEY_RIVLIN;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let geometry = ArmGeometry::with_table_folds(1.1226e-7, 0.02, 0.0, 0.83, 0.15)?;
    let material = BeamMaterial::from(TABLE_MOONEY_RIVLIN[0].1);
    let settings = SolverSettings::default();

    println!("thrust_n  tip_deg  tip_x_m  tip_z_m  root_moment  max_stress_s");
    for k in 0..=5 {
        let thrust = 2.0 * k as f64;
        let sol = solve_elastica(&geometry, &material, &LoadCase::thrust(thrust), &settings)?;
        let tip = sol.tip();
        println!(
            "{thrust:>8.1}  {:>7.3}  {:>7.4}  {:>7.4}  {:>11.4}  {:>12.4}",
            sol.tip_angle,
            tip.x,
            tip.z,
            sol.root_moment,
            max_stress_station(&sol)
        );
    }
    Ok(())
}
