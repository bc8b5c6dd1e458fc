//! Machine-readable run report.
//!
//! Field order is fixed by the struct definitions and maps are ordered, so
//! identical inputs serialize to identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::beam::ModulusMode;
use crate::io::DeflectionCoeffsFile;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.to_string(), message: message.into() }
    }
}

pub mod codes {
    pub const PLACEHOLDER_SECTION: &str = "PLACEHOLDER_SECTION";
    pub const LARGE_DEFLECTION: &str = "LARGE_DEFLECTION";
    pub const CONTACT_EXPECTED: &str = "CONTACT_EXPECTED";
    pub const NONLINEAR_REGIME: &str = "NONLINEAR_REGIME";
    pub const ENVELOPE_EXCEEDED: &str = "ENVELOPE_EXCEEDED";
    pub const NO_RECOMMENDED_INFILL: &str = "NO_RECOMMENDED_INFILL";
    pub const NOT_ATTACHED: &str = "NOT_ATTACHED";
    pub const ARM_ANGLE_OUTSIDE_TABLE: &str = "ARM_ANGLE_OUTSIDE_TABLE";
    pub const RPM_OUTSIDE_TABLE: &str = "RPM_OUTSIDE_TABLE";
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlexuralBlock {
    pub youngs_modulus_pa: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MooneyRivlinBlock {
    pub unit: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infill_percent: Option<f64>,
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c02: f64,
    pub c11: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm_mpa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_used: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialSection {
    pub source: String,
    /// Small-strain modulus used for bending, Pa.
    pub youngs_modulus_pa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flexural: Option<FlexuralBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mooney_rivlin: Option<MooneyRivlinBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSummary {
    pub throttle: f64,
    pub thrust_n: f64,
    pub tip_angle_deg: f64,
    pub tip_x_m: f64,
    pub tip_z_m: f64,
    pub max_curvature_per_m: f64,
    pub max_curvature_station_m: f64,
    pub max_stress_station_m: f64,
    /// 0-based index of the segment holding the max-stress station.
    pub max_stress_segment: usize,
    pub max_fiber_strain: f64,
    pub root_moment_n_m: f64,
    pub residual_n_m: f64,
    pub shooting_iterations: usize,
    pub contact_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub throttle: f64,
    pub thrust_n: f64,
    pub alpha_empirical_deg: f64,
    pub alpha_simulated_deg: f64,
    pub discrepancy_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infill_percent: Option<f64>,
    pub modulus_mode: ModulusMode,
    pub full_throttle: BeamSummary,
    pub comparison: Vec<ComparisonRow>,
    pub max_abs_discrepancy_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencySection {
    pub rpm: f64,
    /// Table interpolation.
    pub eta: f64,
    pub motor_station: f64,
    /// Surrogate efficiency at `motor_station`.
    pub eta_model: f64,
    pub optimum_station: f64,
    pub thrust_n: f64,
    pub arm_angle_deg: f64,
    pub net_vertical_thrust_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflectionFitBlock {
    pub residual_norm_deg: f64,
    pub condition: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub infill_percent: f64,
    pub max_abs_deflection_deg: f64,
    pub worst_throttle: f64,
    pub nonlinear_flag: bool,
    pub passes_14deg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfillRangeBlock {
    pub lo_percent: f64,
    pub hi_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflectionPoint {
    pub infill_percent: f64,
    pub throttle: f64,
    pub alpha_deg: f64,
    pub out_of_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflectionSection {
    pub coefficients: DeflectionCoeffsFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<DeflectionFitBlock>,
    pub envelopes: Vec<EnvelopeRow>,
    pub recommended_infill: Option<InfillRangeBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<DeflectionPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipeFitSection {
    pub diameter_m: f64,
    pub infill_percent: f64,
    pub tendon_force_n: f64,
    pub contact_width_m: f64,
    pub contact_arc_length_m: f64,
    pub per_segment_subtended_deg: Vec<f64>,
    pub total_turning_deg: f64,
    pub coverage_ratio: f64,
    pub max_gap_m: f64,
    pub pressure_n_m2: f64,
    pub bendable: bool,
    pub attached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix_s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<EfficiencySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflection: Option<DeflectionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipe_fit: Option<PipeFitSection>,
    pub warnings: Vec<Warning>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            generated_unix_s: None,
            material: None,
            beam: None,
            efficiency: None,
            deflection: None,
            pipe_fit: None,
            warnings: Vec::new(),
        }
    }

    pub fn warn(&mut self, code: &str, message: impl Into<String>) {
        let w = Warning::new(code, message);
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flattened `key,value` rows with dotted paths and `[i]` indices.
    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("in-memory write");
        for (k, v) in rows {
            w.write_record([k, v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
