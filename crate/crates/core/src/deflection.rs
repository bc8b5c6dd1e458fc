//! Empirical arm-deflection law: a quadratic in throttle whose coefficients
//! are linear in infill rate.
//!
//! Throttle is expressed in throttle units `T = throttle% / 10`, so the
//! operating range is `0..=10`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{solve_elastica, ArmGeometry, BeamError, BeamMaterial, LoadCase, SolverSettings};
use crate::lsq;

/// Throttle percent per throttle unit.
pub const PERCENT_PER_THROTTLE_UNIT: f64 = 10.0;
pub const MAX_THROTTLE: f64 = 10.0;
pub const THROTTLE_UNIT_LABEL: &str = "throttle_percent_div_10";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeflectionError {
    #[error("throttle {throttle} outside [0, {max}]")]
    ThrottleOutOfRange { throttle: f64, max: f64 },
    #[error("rank deficient sweep: {0}")]
    RankDeficient(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("elastica failed at throttle {throttle}: {source}")]
    Solver {
        throttle: f64,
        #[source]
        source: BeamError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeflectionModelCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Angle at zero throttle, deg.
    pub alpha0: f64,
}

/// Published coefficients (zero-throttle angle is per-arm and left at 0).
pub const TABLE_DEFLECTION: DeflectionModelCoeffs =
    DeflectionModelCoeffs { a1: 2.4387, a2: -0.1997, b1: -0.162, b2: 0.0151, alpha0: 0.0 };

impl DeflectionModelCoeffs {
    /// Arm angle in degrees, without range checks.
    pub fn angle(&self, infill: f64, throttle: f64) -> f64 {
        self.alpha0 + (self.a1 + infill * self.a2) * throttle + (self.b1 + infill * self.b2) * throttle * throttle
    }

    pub fn with_alpha0(self, alpha0: f64) -> Self {
        Self { alpha0, ..self }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            a1: self.a1 * factor,
            a2: self.a2 * factor,
            b1: self.b1 * factor,
            b2: self.b2 * factor,
            alpha0: self.alpha0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeflectionSample {
    /// percent
    pub infill_rate: f64,
    /// throttle units
    pub throttle: f64,
    /// deg
    pub angle: f64,
}

/// Thresholds for the envelope scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeLimits {
    /// deg
    pub max_deflection: f64,
    /// Infill (percent) below which the arm leaves the near-linear regime.
    pub nonlinear_infill_below: f64,
    /// Fraction of the throttle range beyond which low-infill arms are out of envelope.
    pub nonlinear_throttle_fraction: f64,
}

impl Default for EnvelopeLimits {
    fn default() -> Self {
        Self { max_deflection: 14.0, nonlinear_infill_below: 5.0, nonlinear_throttle_fraction: 0.8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeflectionEval {
    /// deg
    pub angle: f64,
    pub out_of_envelope: bool,
}

pub fn eval_deflection(
    coeffs: &DeflectionModelCoeffs,
    infill: f64,
    throttle: f64,
) -> Result<DeflectionEval, DeflectionError> {
    if !(0.0..=MAX_THROTTLE).contains(&throttle) {
        return Err(DeflectionError::ThrottleOutOfRange { throttle, max: MAX_THROTTLE });
    }
    let limits = EnvelopeLimits::default();
    Ok(DeflectionEval {
        angle: coeffs.angle(infill, throttle),
        out_of_envelope: infill < limits.nonlinear_infill_below
            && throttle > limits.nonlinear_throttle_fraction * MAX_THROTTLE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflectionFit {
    pub coeffs: DeflectionModelCoeffs,
    /// deg
    pub residual_norm: f64,
    pub condition: f64,
}

/// Least squares on (T, rho*T, T^2, rho*T^2) against `angle - alpha0`.
pub fn fit_deflection_coeffs(samples: &[DeflectionSample], alpha0: f64) -> Result<DeflectionFit, DeflectionError> {
    let distinct = |key: fn(&DeflectionSample) -> f64| {
        let mut v: Vec<f64> = samples.iter().map(key).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if samples.len() < 4 {
        return Err(DeflectionError::RankDeficient(format!("{} samples, need at least 4", samples.len())));
    }
    if distinct(|s| s.infill_rate) < 2 {
        return Err(DeflectionError::RankDeficient("need at least 2 distinct infill rates".into()));
    }
    if distinct(|s| s.throttle) < 3 {
        return Err(DeflectionError::RankDeficient("need at least 3 distinct throttles".into()));
    }

    let mut design = DMatrix::zeros(samples.len(), 4);
    let mut rhs = DVector::zeros(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let (t, r) = (s.throttle, s.infill_rate);
        design[(i, 0)] = t;
        design[(i, 1)] = r * t;
        design[(i, 2)] = t * t;
        design[(i, 3)] = r * t * t;
        rhs[i] = s.angle - alpha0;
    }
    let sol = lsq::solve(&design, &rhs, lsq::MAX_CONDITION)
        .map_err(|e| DeflectionError::RankDeficient(format!("condition {:e}", e.condition)))?;
    let c = &sol.coefficients;
    Ok(DeflectionFit {
        coeffs: DeflectionModelCoeffs { a1: c[0], a2: c[1], b1: c[2], b2: c[3], alpha0 },
        residual_norm: sol.residual_norm,
        condition: sol.condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// Largest |angle - alpha0| over the scan, deg.
    pub max_abs_deflection: f64,
    pub worst_throttle: f64,
    pub nonlinear_flag: bool,
    pub passes_14deg: bool,
}

/// Multiples of `step` up to `t_max`, rounded to 1e-9 so labels such as 8.7 are exact.
fn throttle_grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| (k as f64 * step * 1e9).round() / 1e9).collect();
    if t_max - grid[n] > 1e-9 * step {
        grid.push(t_max);
    }
    grid
}

pub fn envelope_check(
    coeffs: &DeflectionModelCoeffs,
    infill: f64,
    t_max: f64,
    step: f64,
) -> Result<EnvelopeReport, DeflectionError> {
    envelope_check_with(coeffs, infill, t_max, step, &EnvelopeLimits::default())
}

pub fn envelope_check_with(
    coeffs: &DeflectionModelCoeffs,
    infill: f64,
    t_max: f64,
    step: f64,
    limits: &EnvelopeLimits,
) -> Result<EnvelopeReport, DeflectionError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(DeflectionError::InvalidInput(format!("scan step {step} must be > 0")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(DeflectionError::InvalidInput(format!("t_max {t_max} must be >= 0")));
    }
    let (worst_throttle, max_abs_deflection) = throttle_grid(t_max, step)
        .into_iter()
        .map(|t| (t, (coeffs.angle(infill, t) - coeffs.alpha0).abs()))
        .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(EnvelopeReport {
        max_abs_deflection,
        worst_throttle,
        nonlinear_flag: infill < limits.nonlinear_infill_below,
        passes_14deg: max_abs_deflection < limits.max_deflection,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub throttle: f64,
    /// N
    pub thrust: f64,
    pub alpha_empirical: f64,
    pub alpha_simulated: f64,
    pub discrepancy: f64,
}

/// Arm, material and non-thrust loads for an elastica comparison.
#[derive(Debug, Clone, Copy)]
pub struct ElasticaSetup<'a> {
    pub geometry: &'a ArmGeometry,
    pub material: &'a BeamMaterial,
    /// Gravity and tendon loads; the thrust field is overridden per throttle.
    pub base_loads: &'a LoadCase,
    pub settings: &'a SolverSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub max_abs_discrepancy: f64,
}

/// Runs the empirical law and the elastica over the same throttle grid.
///
/// The simulated angle is reported relative to the zero-throttle solution and
/// offset by the empirical zero-throttle angle, so both columns share the same
/// origin.
pub fn compare_to_elastica(
    coeffs: &DeflectionModelCoeffs,
    infill: f64,
    arm: &ElasticaSetup<'_>,
    thrust_map: impl Fn(f64) -> f64,
    throttles: &[f64],
) -> Result<Comparison, DeflectionError> {
    let ElasticaSetup { geometry, material, base_loads, settings } = *arm;
    let solve_at = |throttle: f64, thrust: f64| {
        let loads = LoadCase { thrust, ..base_loads.clone() };
        solve_elastica(geometry, material, &loads, settings)
            .map_err(|source| DeflectionError::Solver { throttle, source })
    };
    let reference = solve_at(0.0, 0.0)?;
    let mut rows = Vec::with_capacity(throttles.len());
    for &throttle in throttles {
        let thrust = thrust_map(throttle);
        let sol = solve_at(throttle, thrust)?;
        let alpha_empirical = coeffs.angle(infill, throttle);
        let alpha_simulated = coeffs.alpha0 + (sol.tip_angle - reference.tip_angle);
        rows.push(ComparisonRow {
            throttle,
            thrust,
            alpha_empirical,
            alpha_simulated,
            discrepancy: alpha_simulated - alpha_empirical,
        });
    }
    let max_abs_discrepancy = rows.iter().map(|r| r.discrepancy.abs()).fold(0.0, f64::max);
    Ok(Comparison { rows, max_abs_discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sweep(coeffs: &DeflectionModelCoeffs) -> Vec<DeflectionSample> {
        let mut out = Vec::new();
        for rho in [6.0, 8.0, 10.0] {
            for t in 0..=10 {
                let t = t as f64;
                out.push(DeflectionSample { infill_rate: rho, throttle: t, angle: coeffs.angle(rho, t) });
            }
        }
        out
    }

    #[test]
    fn eval_known_values() {
        let c = TABLE_DEFLECTION;
        for rho in [1.0, 6.0, 42.0] {
            assert_eq!(eval_deflection(&c.with_alpha0(3.5), rho, 0.0).unwrap().angle, 3.5);
        }
        let a = eval_deflection(&c, 6.0, 5.0).unwrap();
        assert!((a.angle - 4.4175).abs() < 1e-12);
        assert!(!a.out_of_envelope);
        let b = eval_deflection(&c, 10.0, 10.0).unwrap();
        assert!((b.angle - 3.317).abs() < 1e-12);
        assert!(eval_deflection(&c, 6.0, 10.5).is_err());
        assert!(eval_deflection(&c, 6.0, -0.1).is_err());
        assert!(eval_deflection(&c, 4.0, 9.0).unwrap().out_of_envelope);
        assert!(!eval_deflection(&c, 4.0, 8.0).unwrap().out_of_envelope);
    }

    #[test]
    fn fit_round_trip() {
        let fit = fit_deflection_coeffs(&sweep(&TABLE_DEFLECTION), 0.0).unwrap();
        let got = fit.coeffs;
        let want = TABLE_DEFLECTION;
        for (g, w) in [(got.a1, want.a1), (got.a2, want.a2), (got.b1, want.b1), (got.b2, want.b2)] {
            assert!(((g - w) / w).abs() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn single_infill_is_rank_deficient() {
        let samples: Vec<_> = sweep(&TABLE_DEFLECTION).into_iter().filter(|s| s.infill_rate == 6.0).collect();
        assert!(matches!(fit_deflection_coeffs(&samples, 0.0), Err(DeflectionError::RankDeficient(_))));
        assert!(fit_deflection_coeffs(&samples[..3], 0.0).is_err());
    }

    #[test]
    fn noisy_fit_within_ten_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let noisy: Vec<_> = sweep(&TABLE_DEFLECTION)
            .into_iter()
            .map(|s| DeflectionSample { angle: s.angle + rng.random_range(-0.25..=0.25), ..s })
            .collect();
        assert_eq!(noisy.len(), 33);
        let fit = fit_deflection_coeffs(&noisy, 0.0).unwrap().coeffs;
        let want = TABLE_DEFLECTION;
        for (g, w) in [(fit.a1, want.a1), (fit.a2, want.a2), (fit.b1, want.b1), (fit.b2, want.b2)] {
            assert!(((g - w) / w).abs() < 0.10, "{g} vs {w}");
        }
    }

    #[test]
    fn envelope_rho_6() {
        // vertex of 1.2405 T - 0.0714 T^2 lies at T = 8.687; nearest grid point 8.7
        let r = envelope_check(&TABLE_DEFLECTION, 6.0, 10.0, 0.1).unwrap();
        assert!((r.worst_throttle - 8.7).abs() < 1e-9);
        assert!((r.max_abs_deflection - 5.388084).abs() < 1e-9);
        assert!(r.passes_14deg);
        assert!(!r.nonlinear_flag);
    }

    #[test]
    fn envelope_flags_and_zero_model() {
        assert!(envelope_check(&TABLE_DEFLECTION, 4.9, 10.0, 0.1).unwrap().nonlinear_flag);
        let zero = DeflectionModelCoeffs { a1: 0.0, a2: 0.0, b1: 0.0, b2: 0.0, alpha0: 2.0 };
        let r = envelope_check(&zero, 6.0, 10.0, 0.1).unwrap();
        assert_eq!(r.max_abs_deflection, 0.0);
        assert!(r.passes_14deg);
        assert!(envelope_check(&zero, 6.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = throttle_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(throttle_grid(10.0, 0.1).len(), 101);
    }
}
