//! Planar elastica solver for the segmented soft arm.
//!
//! The arm is a clamped-free rod parameterized by arc length `s` from the root.
//! External loads are a follower thrust at the motor station, distributed
//! self-weight and concentrated bending moments (tendons at the folds plus any
//! user-supplied couples). The boundary-value problem is closed by shooting on
//! the free-tip angle: integrating from the tip toward the root, the internal
//! force and moment are known at the tip (both zero) and the follower thrust
//! direction is known as soon as its station is reached.
//!
//! Sign conventions: `theta` is measured from the horizontal, positive upward.
//! A positive internal moment bends the arm upward.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::material::{
    mr_small_strain_modulus, mr_uniaxial_stress, BeamTestGeometry, LinearElasticParams, MooneyRivlinParams, PA_PER_MPA,
};
use crate::ode::rk4_step;
use crate::roots::{bisect_then_secant, RootError};

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Deflection/length ratio above which the linear cantilever formula is flagged.
pub const LARGE_DEFLECTION_RATIO: f64 = 0.1;

/// Fold angles (deg) and lower-surface lengths (m) of the reference arm.
pub const TABLE_FOLDS: [(f64, f64); 4] = [(36.0, 0.035), (27.0, 0.040), (19.0, 0.045), (13.0, 0.055)];

const MAX_SEGMENTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid load case: {0}")]
    InvalidLoads(String),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("non-physical material: {0}")]
    NonPhysicalMaterial(String),
    #[error("shooting did not converge after {iterations} evaluations (best residual {best_residual:e} N*m)")]
    NoConvergence { iterations: usize, best_residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Relative fold angle at the segment, deg.
    pub fold_angle_deg: f64,
    /// m
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmGeometry {
    segments: Vec<Segment>,
    section_inertia: Vec<f64>,
    half_depth: f64,
    initial_droop_deg: f64,
    motor_station: f64,
    linear_density: f64,
}

impl ArmGeometry {
    /// `section_inertia` holds one value per segment, or a single value applied to all.
    pub fn new(
        segments: Vec<Segment>,
        section_inertia: Vec<f64>,
        half_depth: f64,
        initial_droop_deg: f64,
        motor_station: f64,
        linear_density: f64,
    ) -> Result<Self, BeamError> {
        let bad = |m: String| Err(BeamError::InvalidGeometry(m));
        if segments.is_empty() || segments.len() > MAX_SEGMENTS {
            return bad(format!("segment count {} outside 1..={MAX_SEGMENTS}", segments.len()));
        }
        if let Some(i) =
            segments.iter().position(|s| !(s.length > 0.0 && s.length.is_finite() && s.fold_angle_deg.is_finite()))
        {
            return bad(format!("segment {i} has a non-positive or non-finite length/angle"));
        }
        let section_inertia = match section_inertia.len() {
            1 => vec![section_inertia[0]; segments.len()],
            n if n == segments.len() => section_inertia,
            n => return bad(format!("{n} inertia values for {} segments", segments.len())),
        };
        if section_inertia.iter().any(|i| !(*i > 0.0 && i.is_finite())) {
            return bad("section inertia must be > 0".into());
        }
        if !(half_depth > 0.0 && half_depth.is_finite()) {
            return bad(format!("half depth {half_depth} must be > 0"));
        }
        if !initial_droop_deg.is_finite() || initial_droop_deg.abs() >= 90.0 {
            return bad(format!("initial droop {initial_droop_deg} deg out of range"));
        }
        if !(motor_station > 0.0 && motor_station <= 1.0) {
            return bad(format!("motor station {motor_station} outside (0, 1]"));
        }
        if !(linear_density >= 0.0 && linear_density.is_finite()) {
            return bad(format!("linear density {linear_density} must be >= 0"));
        }
        Ok(Self { segments, section_inertia, half_depth, initial_droop_deg, motor_station, linear_density })
    }

    /// Reference fold layout with a uniform section.
    pub fn with_table_folds(
        section_inertia: f64,
        half_depth: f64,
        initial_droop_deg: f64,
        motor_station: f64,
        linear_density: f64,
    ) -> Result<Self, BeamError> {
        let segments = TABLE_FOLDS.iter().map(|&(fold_angle_deg, length)| Segment { fold_angle_deg, length }).collect();
        Self::new(segments, vec![section_inertia], half_depth, initial_droop_deg, motor_station, linear_density)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn section_inertia(&self) -> &[f64] {
        &self.section_inertia
    }

    pub fn half_depth(&self) -> f64 {
        self.half_depth
    }

    pub fn initial_droop_deg(&self) -> f64 {
        self.initial_droop_deg
    }

    pub fn motor_station(&self) -> f64 {
        self.motor_station
    }

    pub fn linear_density(&self) -> f64 {
        self.linear_density
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Sum of the fold angles, deg.
    pub fn total_fold_angle(&self) -> f64 {
        self.segments.iter().map(|s| s.fold_angle_deg).sum()
    }

    /// Arc length of each fold, at the distal end of its segment.
    pub fn fold_stations(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |acc, seg| {
                *acc += seg.length;
                Some(*acc)
            })
            .collect()
    }

    pub fn motor_arc_length(&self) -> f64 {
        self.motor_station * self.total_length()
    }

    /// Index of the segment containing `s`; the distal end belongs to the segment.
    pub fn segment_at(&self, s: f64) -> usize {
        let mut end = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            end += seg.length;
            if s <= end {
                return i;
            }
        }
        self.segments.len() - 1
    }

    pub fn with_initial_droop(mut self, deg: f64) -> Result<Self, BeamError> {
        self.initial_droop_deg = deg;
        Self::new(
            self.segments,
            self.section_inertia,
            self.half_depth,
            self.initial_droop_deg,
            self.motor_station,
            self.linear_density,
        )
    }

    pub fn with_motor_station(mut self, station: f64) -> Result<Self, BeamError> {
        self.motor_station = station;
        Self::new(
            self.segments,
            self.section_inertia,
            self.half_depth,
            self.initial_droop_deg,
            self.motor_station,
            self.linear_density,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrustSide {
    /// Along the upward normal of the arm (+90 deg from the tangent).
    #[default]
    Up,
    Down,
}

impl ThrustSide {
    fn sign(self) -> f64 {
        match self {
            ThrustSide::Up => 1.0,
            ThrustSide::Down => -1.0,
        }
    }
}

/// Concentrated couple; positive bends the arm upward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMoment {
    /// Arc length, m.
    pub station: f64,
    /// N*m
    pub moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    /// Follower thrust at the motor station, N.
    pub thrust: f64,
    #[serde(default)]
    pub thrust_side: ThrustSide,
    /// m/s^2 acting along -z.
    pub gravity: f64,
    /// N, applied at every fold.
    pub tendon_tension: f64,
    /// Offset of the tendon below the neutral axis, m.
    pub tendon_eccentricity: f64,
    #[serde(default)]
    pub point_moments: Vec<PointMoment>,
}

impl Default for LoadCase {
    fn default() -> Self {
        Self {
            thrust: 0.0,
            thrust_side: ThrustSide::Up,
            gravity: STANDARD_GRAVITY,
            tendon_tension: 0.0,
            tendon_eccentricity: 0.0,
            point_moments: Vec::new(),
        }
    }
}

impl LoadCase {
    pub fn thrust(thrust: f64) -> Self {
        Self { thrust, ..Self::default() }
    }

    /// No thrust, no gravity, no tendons.
    pub fn unloaded() -> Self {
        Self { gravity: 0.0, ..Self::default() }
    }

    fn validate(&self) -> Result<(), BeamError> {
        let bad = |m: &str| Err(BeamError::InvalidLoads(m.to_string()));
        if !(self.thrust >= 0.0 && self.thrust.is_finite()) {
            return bad("thrust must be finite and >= 0");
        }
        if !(self.tendon_tension >= 0.0 && self.tendon_tension.is_finite()) {
            return bad("tendon tension must be finite and >= 0");
        }
        if !self.gravity.is_finite() || !self.tendon_eccentricity.is_finite() {
            return bad("gravity and tendon eccentricity must be finite");
        }
        if self.point_moments.iter().any(|p| !p.station.is_finite() || !p.moment.is_finite()) {
            return bad("point moments must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// RK4 steps per integration interval (a segment, or a part of one split by a load station).
    pub integration_steps: usize,
    /// N*m
    pub shooting_tolerance: f64,
    pub max_shooting_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { integration_steps: 256, shooting_tolerance: 1e-9, max_shooting_iterations: 200 }
    }
}

impl SolverSettings {
    fn validate(&self) -> Result<(), BeamError> {
        if self.integration_steps < 16 {
            return Err(BeamError::InvalidSettings(format!("integration_steps {} < 16", self.integration_steps)));
        }
        if !(self.shooting_tolerance > 0.0) {
            return Err(BeamError::InvalidSettings("shooting_tolerance must be > 0".into()));
        }
        if self.max_shooting_iterations == 0 {
            return Err(BeamError::InvalidSettings("max_shooting_iterations must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMode {
    /// Constant modulus 6(C10 + C01).
    #[default]
    SmallStrain,
    /// Secant modulus of the uniaxial curve at the local outer-fiber strain.
    Secant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamMaterial {
    Linear(LinearElasticParams),
    MooneyRivlin { params: MooneyRivlinParams, mode: ModulusMode },
}

impl From<LinearElasticParams> for BeamMaterial {
    fn from(p: LinearElasticParams) -> Self {
        BeamMaterial::Linear(p)
    }
}

impl From<MooneyRivlinParams> for BeamMaterial {
    fn from(params: MooneyRivlinParams) -> Self {
        BeamMaterial::MooneyRivlin { params, mode: ModulusMode::SmallStrain }
    }
}

impl BeamMaterial {
    /// Constant-modulus material; Poisson's ratio plays no role in bending.
    pub fn with_modulus(youngs_modulus: f64) -> Result<Self, BeamError> {
        LinearElasticParams::new(youngs_modulus, 0.0)
            .map(BeamMaterial::Linear)
            .map_err(|e| BeamError::NonPhysicalMaterial(e.to_string()))
    }

    /// Small-strain modulus, Pa.
    pub fn reference_modulus(&self) -> Result<f64, BeamError> {
        let e = match self {
            BeamMaterial::Linear(p) => p.youngs_modulus(),
            BeamMaterial::MooneyRivlin { params, .. } => mr_small_strain_modulus(params).pascals(),
        };
        if e > 0.0 && e.is_finite() {
            Ok(e)
        } else {
            Err(BeamError::NonPhysicalMaterial(format!("effective modulus {e} Pa <= 0")))
        }
    }
}

/// Moment-curvature law for one section.
struct Section<'a> {
    material: &'a BeamMaterial,
    modulus: f64,
    inertia: f64,
    half_depth: f64,
}

impl Section<'_> {
    fn curvature(&self, moment: f64) -> Result<f64, BeamError> {
        let linear = moment / (self.modulus * self.inertia);
        let params = match self.material {
            BeamMaterial::MooneyRivlin { params, mode: ModulusMode::Secant } => params,
            _ => return Ok(linear),
        };
        if moment == 0.0 {
            return Ok(0.0);
        }
        // Outer-fiber strain eps solving sigma(eps) * I / c = |M|.
        let target = moment.abs();
        let c = self.half_depth;
        let i = self.inertia;
        let h = |eps: f64| -> Option<f64> {
            mr_uniaxial_stress(params, 1.0 + eps).ok().map(|s| s * PA_PER_MPA * i / c - target)
        };
        let not_invertible =
            || BeamError::NonPhysicalMaterial(format!("uniaxial curve cannot carry bending moment {target:e} N*m"));
        let mut hi = (linear.abs() * c).max(1e-12);
        let mut fhi = h(hi).ok_or_else(not_invertible)?;
        while fhi <= 0.0 {
            hi *= 2.0;
            if hi > 5.0 {
                return Err(not_invertible());
            }
            fhi = h(hi).ok_or_else(not_invertible)?;
        }
        let root = bisect_then_secant(h, (0.0, -target), (hi, fhi), 1e-13 * target, f64::INFINITY, 200).or_else(
            |e| match e {
                RootError::Exhausted { best } => Ok(best),
                _ => Err(not_invertible()),
            },
        )?;
        Ok(moment.signum() * root.x / c)
    }

    fn fiber_stress(&self, curvature: f64) -> f64 {
        let eps = curvature.abs() * self.half_depth;
        match self.material {
            BeamMaterial::MooneyRivlin { params, mode: ModulusMode::Secant } => {
                curvature.signum() * mr_uniaxial_stress(params, 1.0 + eps).unwrap_or(f64::NAN) * PA_PER_MPA
            }
            _ => self.modulus * curvature * self.half_depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Station {
    /// m
    pub s: f64,
    /// m
    pub x: f64,
    /// m
    pub z: f64,
    /// rad
    pub theta: f64,
    /// Internal bending moment on the proximal side, N*m.
    pub moment: f64,
    /// 1/m
    pub curvature: f64,
    /// Signed outer-fiber bending stress proxy, Pa.
    pub fiber_stress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSolution {
    pub stations: Vec<Station>,
    /// Tip angle from the horizontal, deg.
    pub tip_angle: f64,
    pub max_curvature: f64,
    pub max_curvature_station: f64,
    pub max_fiber_strain: f64,
    /// Root moment-balance defect, N*m.
    pub residual: f64,
    /// Internal root moment from the integration, N*m.
    pub root_moment: f64,
    pub shooting_iterations: usize,
    /// Total turning exceeds the fold design plus a right angle; the arm would
    /// be wrapping onto itself or a support.
    pub contact_expected: bool,
}

impl BeamSolution {
    pub fn tip(&self) -> &Station {
        self.stations.last().expect("solution has stations")
    }
}

/// Cantilever tip deflection under a transverse tip force (small rotations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearDeflection {
    /// m
    pub deflection: f64,
    /// Deflection is large enough that the small-rotation formula is unreliable.
    pub large_deflection: bool,
}

pub fn linear_tip_deflection(youngs_modulus: f64, geometry: &BeamTestGeometry, force: f64) -> LinearDeflection {
    let deflection = force * geometry.length.powi(3) / (3.0 * youngs_modulus * geometry.section_inertia);
    LinearDeflection { deflection, large_deflection: deflection.abs() / geometry.length > LARGE_DEFLECTION_RATIO }
}

enum Jump {
    Force(f64),
    Moment(f64),
}

struct Interval {
    start: f64,
    end: f64,
    segment: usize,
}

struct Elastica<'a> {
    steps: usize,
    sections: Vec<Section<'a>>,
    intervals: Vec<Interval>,
    /// (station, jump) sorted by station.
    jumps: Vec<(f64, Jump)>,
    weight_per_length: f64,
    length: f64,
}

struct Profile {
    stations: Vec<Station>,
    root_theta: f64,
}

impl<'a> Elastica<'a> {
    fn new(
        geometry: &'a ArmGeometry,
        material: &'a BeamMaterial,
        loads: &'a LoadCase,
        settings: &SolverSettings,
    ) -> Result<Self, BeamError> {
        let modulus = material.reference_modulus()?;
        let length = geometry.total_length();
        let folds = geometry.fold_stations();
        let motor = geometry.motor_arc_length();

        let mut jumps: Vec<(f64, Jump)> = Vec::new();
        if loads.thrust > 0.0 {
            jumps.push((motor, Jump::Force(loads.thrust * loads.thrust_side.sign())));
        }
        let tendon = loads.tendon_tension * loads.tendon_eccentricity;
        if tendon != 0.0 {
            jumps.extend(folds.iter().map(|&s| (s, Jump::Moment(-tendon))));
        }
        for pm in &loads.point_moments {
            if pm.station > 0.0 && pm.station <= length * (1.0 + 1e-12) {
                jumps.push((pm.station.min(length), Jump::Moment(pm.moment)));
            }
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut breaks: Vec<f64> = vec![0.0, motor];
        breaks.extend(&folds);
        breaks.extend(jumps.iter().map(|j| j.0));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * length);
        let intervals = breaks
            .windows(2)
            .map(|w| Interval { start: w[0], end: w[1], segment: geometry.segment_at(0.5 * (w[0] + w[1])) })
            .collect();

        let sections = geometry
            .section_inertia
            .iter()
            .map(|&inertia| Section { material, modulus, inertia, half_depth: geometry.half_depth })
            .collect();

        Ok(Self {
            steps: settings.integration_steps + settings.integration_steps % 2,
            sections,
            intervals,
            jumps,
            weight_per_length: geometry.linear_density * loads.gravity,
            length,
        })
    }

    fn root_stiffness(&self) -> f64 {
        let s = &self.sections[0];
        s.modulus * s.inertia
    }

    /// Integrates from the tip (angle `tip_theta`) to the root.
    fn integrate(&self, tip_theta: f64) -> Result<Profile, BeamError> {
        let tol = 1e-12 * self.length;
        let q = self.weight_per_length;
        let length = self.length;
        let mut theta = tip_theta;
        let mut moment = 0.0;
        let (mut x, mut z) = (0.0, 0.0);
        // point-load part of the internal force resultant
        let (mut fx, mut fz) = (0.0, 0.0);
        let mut pending = self.jumps.len();
        let mut stations = Vec::with_capacity(self.intervals.len() * self.steps + 1);

        for interval in self.intervals.iter().rev() {
            let section = &self.sections[interval.segment];

            while pending > 0 && self.jumps[pending - 1].0 >= interval.end - tol {
                match self.jumps[pending - 1].1 {
                    Jump::Force(f) => {
                        fx += -f * theta.sin();
                        fz += f * theta.cos();
                    }
                    Jump::Moment(m) => moment += m,
                }
                pending -= 1;
            }
            // node shared with the previous interval keeps the proximal-side values
            let curvature = section.curvature(moment)?;
            let node = Station {
                s: interval.end,
                x,
                z,
                theta,
                moment,
                curvature,
                fiber_stress: section.fiber_stress(curvature),
            };
            match stations.last_mut() {
                Some(last) => *last = node,
                None => stations.push(node),
            }

            let mut rhs = |s: f64, y: &[f64; 4]| -> Result<[f64; 4], BeamError> {
                let (sin, cos) = y[0].sin_cos();
                let nz = fz - q * (length - s);
                Ok([section.curvature(y[1])?, -(cos * nz - sin * fx), cos, sin])
            };
            let h = -(interval.end - interval.start) / self.steps as f64;
            let mut y = [theta, moment, x, z];
            for k in 0..self.steps {
                let s = interval.end + k as f64 * h;
                y = rk4_step(&mut rhs, s, &y, h)?;
                let s_next = if k + 1 == self.steps { interval.start } else { s + h };
                let curvature = section.curvature(y[1])?;
                stations.push(Station {
                    s: s_next,
                    x: y[2],
                    z: y[3],
                    theta: y[0],
                    moment: y[1],
                    curvature,
                    fiber_stress: section.fiber_stress(curvature),
                });
            }
            [theta, moment, x, z] = y;
        }

        stations.reverse();
        let (x0, z0) = (stations[0].x, stations[0].z);
        for st in &mut stations {
            st.x -= x0;
            st.z -= z0;
        }
        Ok(Profile { stations, root_theta: theta })
    }

    /// Root moment obtained by summing the moments of all applied loads about
    /// the root on the solved shape.
    fn direct_root_moment(&self, stations: &[Station]) -> f64 {
        let at = |s: f64| stations.iter().min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs())).expect("stations");
        let mut total = 0.0;
        for (s, jump) in &self.jumps {
            match jump {
                Jump::Moment(m) => total += m,
                Jump::Force(f) => {
                    let st = at(*s);
                    let (fx, fz) = (-f * st.theta.sin(), f * st.theta.cos());
                    total += st.x * fz - st.z * fx;
                }
            }
        }

        // weight: Simpson over each uniformly meshed interval
        let q = self.weight_per_length;
        if q != 0.0 {
            for (j, interval) in self.intervals.iter().enumerate() {
                let pts = &stations[j * self.steps..=(j + 1) * self.steps];
                let h = (interval.end - interval.start) / self.steps as f64;
                let simpson: f64 = pts
                    .iter()
                    .enumerate()
                    .map(|(k, st)| {
                        let w = if k == 0 || k == self.steps {
                            1.0
                        } else if k % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        w * st.x
                    })
                    .sum::<f64>()
                    * h
                    / 3.0;
                total -= q * simpson;
            }
        }
        total
    }
}

/// Solves the clamped-free elastica for the given loads.
pub fn solve_elastica(
    geometry: &ArmGeometry,
    material: &BeamMaterial,
    loads: &LoadCase,
    settings: &SolverSettings,
) -> Result<BeamSolution, BeamError> {
    loads.validate()?;
    settings.validate()?;
    let problem = Elastica::new(geometry, material, loads, settings)?;

    let root_theta = -geometry.initial_droop_deg.to_radians();
    let moment_scale = problem.root_stiffness() / problem.length;
    let angle_tol = settings.shooting_tolerance / moment_scale;
    let budget = settings.max_shooting_iterations;

    let evaluations = Cell::new(0usize);
    let best = Cell::new(f64::INFINITY);
    let defect = |tip: f64| -> Result<f64, BeamError> {
        evaluations.set(evaluations.get() + 1);
        let g = problem.integrate(tip)?.root_theta - root_theta;
        best.set(best.get().min(g.abs() * moment_scale));
        Ok(g)
    };

    // march from the unloaded guess until the root-angle defect changes sign
    let t0 = root_theta;
    let g0 = defect(t0)?;
    let mut bracket = None;
    if g0.abs() <= angle_tol {
        bracket = Some(((t0, g0), (t0, g0)));
    } else {
        let dir = -g0.signum();
        let step = g0.abs().max(0.05);
        let (mut prev, mut gprev) = (t0, g0);
        let mut k = 0;
        while evaluations.get() < budget {
            let t = t0 + dir * step * f64::from(1u32 << k.min(20));
            if (t - t0).abs() > 4.0 * std::f64::consts::PI {
                break;
            }
            let g = defect(t)?;
            if g.abs() <= angle_tol || g.signum() != gprev.signum() {
                bracket = Some(((prev, gprev), (t, g)));
                break;
            }
            (prev, gprev) = (t, g);
            k += 1;
        }
    }
    let Some((lo, hi)) = bracket else {
        return Err(BeamError::NoConvergence { iterations: evaluations.get(), best_residual: best.get() });
    };

    let used = evaluations.get();
    let best = best.get();
    let remaining = budget.saturating_sub(used);
    let mut inner_error = None;
    let root = bisect_then_secant(
        |t| match problem.integrate(t) {
            Ok(p) => Some(p.root_theta - root_theta),
            Err(e) => {
                inner_error = Some(e);
                None
            }
        },
        lo,
        hi,
        angle_tol,
        1e-2,
        remaining,
    );
    if let Some(e) = inner_error {
        return Err(e);
    }
    let root = match root {
        Ok(r) => r,
        Err(RootError::Exhausted { best: b }) => {
            return Err(BeamError::NoConvergence {
                iterations: budget,
                best_residual: best.min(b.fx.abs() * moment_scale),
            })
        }
        Err(_) => return Err(BeamError::NoConvergence { iterations: used, best_residual: best }),
    };

    let profile = problem.integrate(root.x)?;
    let stations = profile.stations;
    let root_moment = stations[0].moment;
    let residual = (problem.direct_root_moment(&stations) - root_moment).abs()
        + moment_scale * (profile.root_theta - root_theta).abs();

    let max_station = stations
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.curvature.abs().total_cmp(&b.1.curvature.abs()).then(b.0.cmp(&a.0)))
        .map(|(_, st)| st)
        .expect("stations");
    let tip_angle = stations.last().expect("stations").theta.to_degrees();
    let turning = (tip_angle + geometry.initial_droop_deg).abs();

    Ok(BeamSolution {
        tip_angle,
        max_curvature: max_station.curvature.abs(),
        max_curvature_station: max_station.s,
        max_fiber_strain: max_station.curvature.abs() * geometry.half_depth,
        residual,
        root_moment,
        shooting_iterations: used + root.evaluations + 1,
        contact_expected: turning > geometry.total_fold_angle() + 90.0,
        stations,
    })
}

/// Arc length of the largest outer-fiber stress.
///
/// A stress-free arm reports the root. Among stations tied with the maximum
/// (within 1e-9 relative) the most distal one is reported, which places a
/// constant-moment span at the load that produces it.
pub fn max_stress_station(solution: &BeamSolution) -> f64 {
    let peak = solution.stations.iter().map(|st| st.fiber_stress.abs()).fold(0.0_f64, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    solution.stations.iter().rev().find(|st| st.fiber_stress.abs() >= peak * (1.0 - 1e-9)).map_or(0.0, |st| st.s)
}

/// Tendon-only bending with the tendon running along the lower outer fiber.
pub fn tendon_bend(
    geometry: &ArmGeometry,
    material: &BeamMaterial,
    tension: f64,
    settings: &SolverSettings,
) -> Result<BeamSolution, BeamError> {
    let loads = LoadCase { tendon_tension: tension, tendon_eccentricity: geometry.half_depth(), ..LoadCase::default() };
    solve_elastica(geometry, material, &loads, settings)
}
