//! Checks the empirical deflection law against the 14 degree bound and refits it.
//!
//! Run with `cargo run --example deflection_envelope`.

use softarm::adapt::recommend_infill;
use softarm::deflection::{envelope_check, fit_deflection_coeffs, DeflectionSample, MAX_THROTTLE, TABLE_DEFLECTION};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for infill in [6.0, 8.0, 10.0] {
        let r = envelope_check(&TABLE_DEFLECTION, infill, MAX_THROTTLE, 0.1)?;
        println!(
            "infill {infill:>4}%  max |alpha| {:.3} deg at T={}  passes {}  nonlinear {}",
            r.max_abs_deflection, r.worst_throttle, r.passes_14deg, r.nonlinear_flag
        );
    }

    let range = recommend_infill(&TABLE_DEFLECTION, 0.0)?;
    println!("recommended infill {}% to {}%", range.lo, range.hi);

    let mut samples = Vec::new();
    for infill in [6.0, 8.0, 10.0] {
        for k in 0..=10 {
            let throttle = k as f64;
            samples.push(DeflectionSample {
                infill_rate: infill,
                throttle,
                angle: TABLE_DEFLECTION.angle(infill, throttle),
            });
        }
    }
    let fit = fit_deflection_coeffs(&samples, 0.0)?;
    println!("refit {:?}  residual {:.1e}", fit.coeffs, fit.residual_norm);
    Ok(())
}
