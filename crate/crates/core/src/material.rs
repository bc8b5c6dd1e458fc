//! Material characterization of printed TPU.
//!
//! Two routes are provided. The linear route turns cantilever force/deflection
//! pairs into a flexural modulus. The nonlinear route fits a five-term
//! Mooney-Rivlin strain energy to a uniaxial stress-strain curve, assuming an
//! incompressible material so the fit reduces to linear least squares.
//!
//! Mooney-Rivlin coefficients are held in MPa. Curves and moduli crossing the
//! public boundary are in Pa unless the name says otherwise.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lsq;

pub const PA_PER_MPA: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid stretch {0}: must be positive")]
    InvalidStretch(f64),
    #[error("design matrix is rank deficient ({rows}x{cols}, condition {condition:e})")]
    RankDeficient { rows: usize, cols: usize, condition: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexuralSample {
    /// N
    pub force: f64,
    /// m
    pub tip_deflection: f64,
}

impl FlexuralSample {
    pub fn new(force: f64, tip_deflection: f64) -> Self {
        Self { force, tip_deflection }
    }
}

/// Cantilever test specimen. `half_depth` is only needed to convert to stress/strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamTestGeometry {
    /// m
    pub length: f64,
    /// m^4
    pub section_inertia: f64,
    /// Distance from neutral axis to outer fiber, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_depth: Option<f64>,
}

impl BeamTestGeometry {
    pub fn new(length: f64, section_inertia: f64) -> Result<Self, MaterialError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(MaterialError::InvalidParameter(format!("length {length} must be > 0")));
        }
        if !(section_inertia > 0.0 && section_inertia.is_finite()) {
            return Err(MaterialError::InvalidParameter(format!("section inertia {section_inertia} must be > 0")));
        }
        Ok(Self { length, section_inertia, half_depth: None })
    }

    pub fn with_half_depth(mut self, half_depth: f64) -> Result<Self, MaterialError> {
        if !(half_depth > 0.0 && half_depth.is_finite()) {
            return Err(MaterialError::InvalidParameter(format!("half depth {half_depth} must be > 0")));
        }
        self.half_depth = Some(half_depth);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPattern {
    Cubic,
    ZigZag,
    Gyroid,
}

/// Uniaxial engineering stress-strain samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressStrainCurve {
    /// (strain, stress in Pa), strictly increasing in strain.
    samples: Vec<(f64, f64)>,
    pub infill_rate: Option<f64>,
    pub grid_pattern: Option<GridPattern>,
}

impl StressStrainCurve {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, MaterialError> {
        for (i, &(e, s)) in samples.iter().enumerate() {
            if !e.is_finite() || !s.is_finite() {
                return Err(MaterialError::InvalidCurve(format!("sample {i} is not finite")));
            }
            if e <= -1.0 {
                return Err(MaterialError::InvalidCurve(format!("sample {i}: strain {e} <= -1")));
            }
            if e == 0.0 && s != 0.0 {
                return Err(MaterialError::InvalidCurve(format!("sample {i}: nonzero stress {s} at zero strain")));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(MaterialError::InvalidCurve(format!("strains must be strictly increasing (sample {})", i + 1)));
        }
        Ok(Self { samples, infill_rate: None, grid_pattern: None })
    }

    pub fn with_infill(mut self, infill_rate: f64) -> Self {
        self.infill_rate = Some(infill_rate);
        self
    }

    pub fn with_pattern(mut self, pattern: GridPattern) -> Self {
        self.grid_pattern = Some(pattern);
        self
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Five-term Mooney-Rivlin coefficients, MPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MooneyRivlinParams {
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c02: f64,
    pub c11: f64,
}

impl MooneyRivlinParams {
    pub const fn new(c10: f64, c01: f64, c20: f64, c02: f64, c11: f64) -> Self {
        Self { c10, c01, c20, c02, c11 }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.c10, self.c01, self.c20, self.c02, self.c11]
    }

    pub fn from_array(c: [f64; 5]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4])
    }

    /// Analytic (dW/dI1, dW/dI2), MPa.
    pub fn energy_gradient(&self, inv: UniaxialInvariants) -> (f64, f64) {
        let a = inv.i1 - 3.0;
        let b = inv.i2 - 3.0;
        (self.c10 + 2.0 * self.c20 * a + self.c11 * b, self.c01 + 2.0 * self.c02 * b + self.c11 * a)
    }
}

/// Published coefficients for TPU 70A at 6, 8 and 10 % infill.
pub const TABLE_MOONEY_RIVLIN: [(f64, MooneyRivlinParams); 3] = [
    (6.0, MooneyRivlinParams::new(-3.19, 4.23, 0.64, -2.65, 4.37)),
    (8.0, MooneyRivlinParams::new(-4.07, 4.18, 0.71, -2.62, 4.54)),
    (10.0, MooneyRivlinParams::new(-4.51, 4.16, 0.76, -2.75, 4.89)),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearElasticParams {
    youngs_modulus: f64,
    poisson_ratio: f64,
}

impl LinearElasticParams {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self, MaterialError> {
        if !(youngs_modulus > 0.0 && youngs_modulus.is_finite()) {
            return Err(MaterialError::InvalidParameter(format!("Young's modulus {youngs_modulus} must be > 0")));
        }
        if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
            return Err(MaterialError::InvalidParameter(format!("Poisson ratio {poisson_ratio} outside (-1, 0.5)")));
        }
        Ok(Self { youngs_modulus, poisson_ratio })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    pub fn lame_lambda(&self) -> f64 {
        let nu = self.poisson_ratio;
        self.youngs_modulus * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniaxialInvariants {
    pub i1: f64,
    pub i2: f64,
}

/// Flexural modulus from a through-origin fit of F against deflection.
pub fn fit_flexural_modulus(samples: &[FlexuralSample], geometry: &BeamTestGeometry) -> Result<f64, MaterialError> {
    if samples.len() < 2 {
        return Err(MaterialError::DegenerateData(format!("need at least 2 samples, got {}", samples.len())));
    }
    if samples.iter().any(|s| !s.force.is_finite() || !s.tip_deflection.is_finite()) {
        return Err(MaterialError::DegenerateData("non-finite sample".into()));
    }
    if samples.iter().any(|s| s.force < 0.0) {
        return Err(MaterialError::DegenerateData("negative force".into()));
    }
    let first = samples[0].force;
    if samples.iter().all(|s| s.force == first) {
        return Err(MaterialError::DegenerateData("all forces are equal".into()));
    }

    let sdd: f64 = samples.iter().map(|s| s.tip_deflection * s.tip_deflection).sum();
    if sdd == 0.0 {
        return Err(MaterialError::DegenerateData("all deflections are zero".into()));
    }
    let sfd: f64 = samples.iter().map(|s| s.force * s.tip_deflection).sum();
    let slope = sfd / sdd;
    if slope <= 0.0 {
        return Err(MaterialError::DegenerateData(format!("non-positive slope {slope}")));
    }
    Ok(slope * geometry.length.powi(3) / (3.0 * geometry.section_inertia))
}

pub fn uniaxial_invariants(stretch: f64) -> Result<UniaxialInvariants, MaterialError> {
    if !(stretch > 0.0 && stretch.is_finite()) {
        return Err(MaterialError::InvalidStretch(stretch));
    }
    let l = stretch;
    Ok(UniaxialInvariants { i1: l * l + 2.0 / l, i2: 2.0 * l + 1.0 / (l * l) })
}

/// Strain energy density, MPa.
pub fn mr_strain_energy(params: &MooneyRivlinParams, inv: UniaxialInvariants) -> f64 {
    let a = inv.i1 - 3.0;
    let b = inv.i2 - 3.0;
    params.c10 * a + params.c01 * b + params.c20 * a * a + params.c02 * b * b + params.c11 * a * b
}

/// Per-coefficient contribution to the uniaxial engineering stress, i.e. one
/// row of the fitting design matrix.
fn uniaxial_basis(stretch: f64) -> Result<[f64; 5], MaterialError> {
    let inv = uniaxial_invariants(stretch)?;
    let l = stretch;
    let a = inv.i1 - 3.0;
    let b = inv.i2 - 3.0;
    let k = 2.0 * (l - 1.0 / (l * l));
    Ok([k, k / l, k * 2.0 * a, k * 2.0 * b / l, k * (b + a / l)])
}

/// Incompressible uniaxial engineering stress, MPa.
pub fn mr_uniaxial_stress(params: &MooneyRivlinParams, stretch: f64) -> Result<f64, MaterialError> {
    let basis = uniaxial_basis(stretch)?;
    Ok(basis.iter().zip(params.to_array()).map(|(b, c)| b * c).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MooneyRivlinFit {
    pub params: MooneyRivlinParams,
    /// Residual 2-norm, MPa.
    pub residual_norm: f64,
    pub condition: f64,
    pub samples_used: usize,
}

/// Linear least-squares calibration of the five coefficients against `curve`.
///
/// Samples at zero strain carry no information and are skipped. Stretch is
/// taken as `1 + strain` (engineering strain).
pub fn fit_mooney_rivlin(curve: &StressStrainCurve) -> Result<MooneyRivlinFit, MaterialError> {
    let used: Vec<(f64, f64)> = curve.samples().iter().copied().filter(|&(e, _)| e != 0.0).collect();

    let mut design = DMatrix::zeros(used.len(), 5);
    let mut rhs = DVector::zeros(used.len());
    for (row, &(strain, stress)) in used.iter().enumerate() {
        let basis = uniaxial_basis(1.0 + strain)?;
        for (col, v) in basis.iter().enumerate() {
            design[(row, col)] = *v;
        }
        rhs[row] = stress / PA_PER_MPA;
    }

    let sol = lsq::solve(&design, &rhs, lsq::MAX_CONDITION).map_err(|e| MaterialError::RankDeficient {
        rows: e.rows,
        cols: e.cols,
        condition: e.condition,
    })?;
    let c = &sol.coefficients;
    Ok(MooneyRivlinFit {
        params: MooneyRivlinParams::new(c[0], c[1], c[2], c[3], c[4]),
        residual_norm: sol.residual_norm,
        condition: sol.condition,
        samples_used: used.len(),
    })
}

/// Noise-free engineering stress-strain curve in Pa sampled at the given stretches.
pub fn synthesize_uniaxial_curve(
    params: &MooneyRivlinParams,
    stretches: impl IntoIterator<Item = f64>,
) -> Result<StressStrainCurve, MaterialError> {
    let samples = stretches
        .into_iter()
        .map(|l| Ok((l - 1.0, mr_uniaxial_stress(params, l)? * PA_PER_MPA)))
        .collect::<Result<Vec<_>, MaterialError>>()?;
    StressStrainCurve::new(samples)
}

/// Initial (zero-strain) Young's modulus with a physical-admissibility flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallStrainModulus {
    pub mpa: f64,
    /// Set when the modulus is not positive; the value is still reported.
    pub non_physical: bool,
}

impl SmallStrainModulus {
    pub fn pascals(&self) -> f64 {
        self.mpa * PA_PER_MPA
    }
}

pub fn mr_small_strain_modulus(params: &MooneyRivlinParams) -> SmallStrainModulus {
    let mpa = 6.0 * (params.c10 + params.c01);
    SmallStrainModulus { mpa, non_physical: mpa <= 0.0 }
}

/// Maps cantilever (F, deflection) pairs to outer-fiber root stress/strain.
pub fn stress_strain_from_flexural(
    samples: &[FlexuralSample],
    geometry: &BeamTestGeometry,
) -> Result<StressStrainCurve, MaterialError> {
    if samples.len() < 2 {
        return Err(MaterialError::DegenerateData(format!("need at least 2 samples, got {}", samples.len())));
    }
    let c =
        geometry.half_depth.ok_or_else(|| MaterialError::DegenerateData("specimen half depth is required".into()))?;
    let l = geometry.length;
    let i = geometry.section_inertia;

    let mut points: Vec<(f64, f64)> =
        samples.iter().map(|s| (s.tip_deflection * 3.0 * c / (l * l), s.force * l * c / i)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    StressStrainCurve::new(points).map_err(|e| MaterialError::DegenerateData(e.to_string()))
}
