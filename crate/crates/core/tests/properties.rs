use proptest::prelude::*;

use softarm::adapt::{attach_check, contact_pressure, wrap_geometry, PipeSpec};
use softarm::aero::EfficiencyTable;
use softarm::beam::{solve_elastica, ArmGeometry, BeamMaterial, LoadCase, SolverSettings, ThrustSide};
use softarm::material::{
    fit_mooney_rivlin, mr_strain_energy, synthesize_uniaxial_curve, MooneyRivlinParams, UniaxialInvariants,
};

const INERTIA: f64 = 1.1226e-7;
const HALF_DEPTH: f64 = 0.02;
const MODULUS: f64 = 6.24e6;

fn arm(droop: f64) -> ArmGeometry {
    ArmGeometry::with_table_folds(INERTIA, HALF_DEPTH, droop, 0.83, 0.15).unwrap()
}

fn weightless(thrust: f64, side: ThrustSide) -> LoadCase {
    LoadCase { thrust_side: side, gravity: 0.0, ..LoadCase::thrust(thrust) }
}

fn coefficient() -> impl Strategy<Value = f64> {
    (0.1..5.0f64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mooney_rivlin_round_trip(c in prop::array::uniform5(coefficient())) {
        let params = MooneyRivlinParams::from_array(c);
        let stretches = (0..50).map(|k| 1.01 + 0.49 * k as f64 / 49.0);
        let curve = synthesize_uniaxial_curve(&params, stretches).unwrap();
        let fit = fit_mooney_rivlin(&curve).unwrap();
        for (got, want) in fit.params.to_array().iter().zip(c) {
            prop_assert!((got - want).abs() <= 1e-6 * want.abs(), "{got} vs {want}");
        }
    }

    #[test]
    fn energy_gradient_matches_finite_differences(
        c in prop::array::uniform5(coefficient()),
        i1 in 3.0..4.5f64,
        i2 in 3.0..4.5f64,
    ) {
        let params = MooneyRivlinParams::from_array(c);
        let (w1, w2) = params.energy_gradient(UniaxialInvariants { i1, i2 });
        let h = 1e-4;
        let w = |i1, i2| mr_strain_energy(&params, UniaxialInvariants { i1, i2 });
        let fd1 = (w(i1 + h, i2) - w(i1 - h, i2)) / (2.0 * h);
        let fd2 = (w(i1, i2 + h) - w(i1, i2 - h)) / (2.0 * h);
        prop_assert!((w1 - fd1).abs() <= 1e-6 * w1.abs().max(1.0));
        prop_assert!((w2 - fd2).abs() <= 1e-6 * w2.abs().max(1.0));
    }

    #[test]
    fn efficiency_lookup_is_bounded_and_monotone(a in 0.0..10_000.0f64, b in 0.0..10_000.0f64) {
        let table = EfficiencyTable::paper();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (ea, eb) = (table.lookup(lo), table.lookup(hi));
        let etas: Vec<f64> = table.rows().iter().map(|r| r.1).collect();
        let min = etas.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(ea >= min && eb <= max);
        prop_assert!(ea <= eb);
    }

    #[test]
    fn total_turning_ignores_pipe_diameter(d in 0.055..2.0f64) {
        let w = wrap_geometry(&arm(0.0), &PipeSpec::new(d).unwrap()).unwrap();
        prop_assert!((w.total_turning - 95.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_decreases_with_diameter(d in 0.055..2.0f64, grow in 1.001..3.0f64) {
        let g = arm(0.0);
        let small = wrap_geometry(&g, &PipeSpec::new(d).unwrap()).unwrap();
        let large = wrap_geometry(&g, &PipeSpec::new(d * grow).unwrap()).unwrap();
        prop_assert!(large.coverage_ratio <= small.coverage_ratio);
        if small.coverage_ratio < 1.0 {
            prop_assert!(large.coverage_ratio < small.coverage_ratio);
        }
    }

    #[test]
    fn attachment_is_monotone(rho in 0.0..30.0f64, drho in 0.0..10.0f64, p in 0.0..5000.0f64, dp in 0.0..5000.0f64) {
        let v = attach_check(rho, p);
        prop_assert_eq!(v.attached, v.bendable && v.pressure >= 1000.0);
        // stiffer or looser never turns a failure into an attachment
        if !v.attached {
            prop_assert!(!attach_check(rho + drho, p).attached);
        } else {
            prop_assert!(attach_check(rho, p + dp).attached);
        }
    }

    #[test]
    fn contact_pressure_scales_with_force(f in 0.0..100.0f64, w in 0.001..0.1f64, arc in 0.001..1.0f64) {
        let p = contact_pressure(f, w, arc).unwrap();
        let p2 = contact_pressure(2.0 * f, w, arc).unwrap();
        prop_assert!((p2 - 2.0 * p).abs() <= 1e-12 * p2.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn thrust_side_mirrors_weightless_arm(thrust in 0.1..12.0f64) {
        let g = arm(0.0);
        let m = BeamMaterial::with_modulus(MODULUS).unwrap();
        let s = SolverSettings::default();
        let up = solve_elastica(&g, &m, &weightless(thrust, ThrustSide::Up), &s).unwrap();
        let down = solve_elastica(&g, &m, &weightless(thrust, ThrustSide::Down), &s).unwrap();
        for (a, b) in up.stations.iter().zip(&down.stations) {
            prop_assert!((a.x - b.x).abs() < 1e-9);
            prop_assert!((a.z + b.z).abs() < 1e-9);
            prop_assert!((a.theta + b.theta).abs() < 1e-8);
        }
    }

    #[test]
    fn droop_rotates_weightless_solution(thrust in 0.1..12.0f64, droop in -30.0..30.0f64) {
        let m = BeamMaterial::with_modulus(MODULUS).unwrap();
        let s = SolverSettings::default();
        let loads = weightless(thrust, ThrustSide::Up);
        let level = solve_elastica(&arm(0.0), &m, &loads, &s).unwrap();
        let tilted = solve_elastica(&arm(droop), &m, &loads, &s).unwrap();
        prop_assert!((tilted.tip_angle - (level.tip_angle - droop)).abs() < 1e-6);
        let (sin, cos) = (-droop.to_radians()).sin_cos();
        for (a, b) in level.stations.iter().zip(&tilted.stations) {
            let (x, z) = (a.x * cos - a.z * sin, a.x * sin + a.z * cos);
            prop_assert!((x - b.x).abs() < 1e-9 && (z - b.z).abs() < 1e-9);
            prop_assert!((a.moment - b.moment).abs() < 1e-8);
        }
    }

    #[test]
    fn mesh_doubling_converges(thrust in 0.0..12.0f64) {
        let g = arm(0.0);
        let m = BeamMaterial::with_modulus(MODULUS).unwrap();
        let coarse = SolverSettings::default();
        let fine = SolverSettings { integration_steps: 2 * coarse.integration_steps, ..coarse };
        let loads = LoadCase::thrust(thrust);
        let a = solve_elastica(&g, &m, &loads, &coarse).unwrap();
        let b = solve_elastica(&g, &m, &loads, &fine).unwrap();
        prop_assert!((a.tip_angle - b.tip_angle).abs() <= 1e-3 * b.tip_angle.abs().max(1.0));
        prop_assert!(a.residual <= 1e-6 && b.residual <= 1e-6, "{} {}", a.residual, b.residual);
    }
}
