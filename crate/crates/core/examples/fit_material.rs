//! Fits Mooney-Rivlin coefficients to a uniaxial curve and to a cantilever test.
//!
//! Run with `cargo run --example fit_material`.

use softarm::material::{
    fit_flexural_modulus, fit_mooney_rivlin, mr_small_strain_modulus, synthesize_uniaxial_curve, BeamTestGeometry,
    FlexuralSample, TABLE_MOONEY_RIVLIN,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (infill, params) in TABLE_MOONEY_RIVLIN {
        let stretches = (0..40).map(|k| 1.0 + 0.5 * (k + 1) as f64 / 40.0);
        let curve = synthesize_uniaxial_curve(&params, stretches)?.with_infill(infill);
        let fit = fit_mooney_rivlin(&curve)?;
        let e0 = mr_small_strain_modulus(&fit.params);
        println!(
            "infill {infill:>4}%  c = {:.4?} MPa  cond {:.1e}  E0 {:.3} MPa{}",
            fit.params.to_array(),
            fit.condition,
            e0.mpa,
            if e0.non_physical { "  (non-physical)" } else { "" }
        );
    }

    // 300 mm specimen, 1e-9 m^4 section, deflection 0.9 m per N
    let geometry = BeamTestGeometry::new(0.3, 1e-9)?;
    let samples: Vec<_> = [0.01, 0.02, 0.03].iter().map(|&f| FlexuralSample::new(f, 0.9 * f)).collect();
    let e = fit_flexural_modulus(&samples, &geometry)?;
    println!("flexural modulus {:.3} MPa", e / 1e6);
    Ok(())
}
