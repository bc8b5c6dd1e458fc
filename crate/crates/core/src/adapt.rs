//! Pipe attachment: how the folded lower surface wraps a pipe, the contact
//! pressure a tendon produces, and the empirical rules for a secure grip.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::ArmGeometry;
use crate::deflection::{envelope_check_with, DeflectionModelCoeffs, EnvelopeLimits, MAX_THROTTLE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdaptError {
    #[error("invalid pipe diameter {0} m")]
    InvalidDiameter(f64),
    #[error("segment {segment} chord {length} m does not fit a {diameter} m pipe")]
    ChordTooLong { segment: usize, length: f64, diameter: f64 },
    #[error("contact area must be positive (width {width} m, arc {arc} m)")]
    ZeroArea { width: f64, arc: f64 },
    #[error("no infill rate satisfies the deflection, regime and bendability constraints")]
    EmptyRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipeSpec {
    diameter: f64,
}

impl PipeSpec {
    pub fn new(diameter: f64) -> Result<Self, AdaptError> {
        if diameter > 0.0 && diameter.is_finite() {
            Ok(Self { diameter })
        } else {
            Err(AdaptError::InvalidDiameter(diameter))
        }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrapResult {
    /// Sum of fold angles, deg.
    pub total_turning: f64,
    /// Pipe arc spanned by each segment chord, deg.
    pub per_segment_subtended: Vec<f64>,
    pub coverage_ratio: f64,
    /// Largest chord-to-circle sagitta, m.
    pub max_gap: f64,
}

impl WrapResult {
    /// Arc length of pipe wall under the wrapped segments, m.
    pub fn contact_arc_length(&self, pipe: &PipeSpec) -> f64 {
        let subtended: f64 = self.per_segment_subtended.iter().sum();
        0.5 * pipe.diameter * subtended.min(360.0).to_radians()
    }
}

/// Lays each segment as a chord of the pipe cross-section.
pub fn wrap_geometry(geometry: &ArmGeometry, pipe: &PipeSpec) -> Result<WrapResult, AdaptError> {
    let d = pipe.diameter;
    let mut per_segment_subtended = Vec::with_capacity(geometry.segments().len());
    let mut max_gap: f64 = 0.0;
    for (segment, seg) in geometry.segments().iter().enumerate() {
        if seg.length > d {
            return Err(AdaptError::ChordTooLong { segment, length: seg.length, diameter: d });
        }
        let half = (seg.length / d).asin();
        per_segment_subtended.push(2.0 * half.to_degrees());
        max_gap = max_gap.max(0.5 * d * (1.0 - half.cos()));
    }
    let coverage: f64 = per_segment_subtended.iter().sum::<f64>() / 360.0;
    Ok(WrapResult {
        total_turning: geometry.total_fold_angle(),
        per_segment_subtended,
        coverage_ratio: coverage.min(1.0),
        max_gap,
    })
}

/// Uniform pressure over the contact patch, N/m^2.
pub fn contact_pressure(tendon_force: f64, contact_width: f64, contact_arc_length: f64) -> Result<f64, AdaptError> {
    if !(contact_width > 0.0 && contact_arc_length > 0.0) {
        return Err(AdaptError::ZeroArea { width: contact_width, arc: contact_arc_length });
    }
    Ok(tendon_force / (contact_width * contact_arc_length))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttachmentRules {
    /// Arms with infill strictly below this (percent) bend fully.
    pub bendable_infill_below: f64,
    /// Minimum contact pressure for a secure grip, N/m^2 (inclusive).
    pub min_pressure: f64,
}

impl Default for AttachmentRules {
    fn default() -> Self {
        Self { bendable_infill_below: 15.0, min_pressure: 1000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttachmentVerdict {
    pub bendable: bool,
    /// N/m^2
    pub pressure: f64,
    pub attached: bool,
}

pub fn attach_check(infill: f64, pressure: f64) -> AttachmentVerdict {
    attach_check_with(&AttachmentRules::default(), infill, pressure)
}

pub fn attach_check_with(rules: &AttachmentRules, infill: f64, pressure: f64) -> AttachmentVerdict {
    let bendable = infill < rules.bendable_infill_below;
    AttachmentVerdict { bendable, pressure, attached: bendable && pressure >= rules.min_pressure }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfillRange {
    /// percent
    pub lo: f64,
    pub hi: f64,
}

impl InfillRange {
    pub fn contains(&self, other: &InfillRange) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

pub const INFILL_SCAN: (f64, f64, f64) = (4.0, 15.0, 0.5);

/// Widest contiguous run of scanned infill rates that keep the arm within the
/// deflection bound, in the near-linear regime and bendable.
pub fn recommend_infill(coeffs: &DeflectionModelCoeffs, alpha0: f64) -> Result<InfillRange, AdaptError> {
    recommend_infill_with(coeffs, alpha0, &EnvelopeLimits::default(), &AttachmentRules::default())
}

pub fn recommend_infill_with(
    coeffs: &DeflectionModelCoeffs,
    alpha0: f64,
    limits: &EnvelopeLimits,
    rules: &AttachmentRules,
) -> Result<InfillRange, AdaptError> {
    let coeffs = coeffs.with_alpha0(alpha0);
    let (start, end, step) = INFILL_SCAN;
    let n = ((end - start) / step).round() as usize;

    let mut best: Option<InfillRange> = None;
    let mut run: Option<InfillRange> = None;
    for k in 0..=n {
        let rho = start + k as f64 * step;
        let ok = envelope_check_with(&coeffs, rho, MAX_THROTTLE, 0.1, limits)
            .map(|r| r.passes_14deg && !r.nonlinear_flag)
            .unwrap_or(false)
            && attach_check_with(rules, rho, f64::INFINITY).bendable;
        run = match (ok, run) {
            (true, Some(r)) => Some(InfillRange { lo: r.lo, hi: rho }),
            (true, None) => Some(InfillRange { lo: rho, hi: rho }),
            (false, _) => None,
        };
        if let Some(r) = run {
            if best.is_none_or(|b| r.hi - r.lo > b.hi - b.lo) {
                best = Some(r);
            }
        }
    }
    best.ok_or(AdaptError::EmptyRange)
}
