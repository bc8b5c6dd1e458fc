//! Run configuration and input resolution.
//!
//! Paths inside a config file are relative to the file's directory. Without a
//! config file the shipped defaults are used; they are compiled in, so the
//! tool runs from any working directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adapt::AttachmentRules;
use crate::aero::PropellerModel;
use crate::beam::{ModulusMode, SolverSettings};
use crate::deflection::EnvelopeLimits;
use crate::io::InputError;

pub const DEFAULT_CONFIG_NAME: &str = "config.json";

const EMBEDDED: [(&str, &str); 5] = [
    ("config.json", include_str!("../data/paper/config.json")),
    ("arm_geometry.json", include_str!("../data/paper/arm_geometry.json")),
    ("efficiency.csv", include_str!("../data/paper/efficiency.csv")),
    ("mooney_rivlin.json", include_str!("../data/paper/mooney_rivlin.json")),
    ("deflection_coeffs.json", include_str!("../data/paper/deflection_coeffs.json")),
];

pub const REPORT_SCHEMA: &str = include_str!("../data/schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSource {
    /// Row of a Mooney-Rivlin coefficient table, selected by infill.
    Table {
        path: String,
        infill_percent: f64,
        #[serde(default)]
        modulus_mode: ModulusMode,
    },
    /// Mooney-Rivlin coefficients in MPa.
    Coefficients {
        c10: f64,
        c01: f64,
        c20: f64,
        c02: f64,
        c11: f64,
        #[serde(default)]
        modulus_mode: ModulusMode,
    },
    StressStrainCsv {
        path: String,
        #[serde(default)]
        modulus_mode: ModulusMode,
    },
    /// Cantilever bending test; yields a constant modulus.
    FlexuralCsv { path: String, length_m: f64, inertia_m4: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub attach_pressure_n_m2: f64,
    pub bendable_infill_below: f64,
    pub max_deflection_deg: f64,
    pub nonlinear_infill_below: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        let rules = AttachmentRules::default();
        let limits = EnvelopeLimits::default();
        Self {
            attach_pressure_n_m2: rules.min_pressure,
            bendable_infill_below: rules.bendable_infill_below,
            max_deflection_deg: limits.max_deflection,
            nonlinear_infill_below: limits.nonlinear_infill_below,
        }
    }
}

impl Thresholds {
    pub fn attachment_rules(&self) -> AttachmentRules {
        AttachmentRules { bendable_infill_below: self.bendable_infill_below, min_pressure: self.attach_pressure_n_m2 }
    }

    pub fn envelope_limits(&self) -> EnvelopeLimits {
        EnvelopeLimits {
            max_deflection: self.max_deflection_deg,
            nonlinear_infill_below: self.nonlinear_infill_below,
            ..EnvelopeLimits::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerConfig {
    pub nominal_rpm: f64,
    pub nominal_thrust_n: f64,
}

impl PropellerConfig {
    pub fn model(&self) -> Result<PropellerModel, crate::aero::AeroError> {
        PropellerModel::calibrated(self.nominal_rpm, self.nominal_thrust_n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeConfig {
    pub diameter_m: f64,
    pub contact_width_m: f64,
    pub tendon_force_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: String,
    pub material: MaterialSource,
    pub efficiency_table: String,
    pub deflection_coeffs: String,
    #[serde(default)]
    pub thresholds: Thresholds,
    pub propeller: PropellerConfig,
    pub rpm: f64,
    /// Thrust at full throttle, N. Thrust scales with throttle squared.
    pub max_thrust_n: f64,
    pub infill_rates: Vec<f64>,
    /// Envelope scan step, throttle units.
    pub envelope_step: f64,
    /// Throttle grid for the elastica comparison, throttle units.
    pub elastica_throttles: Vec<f64>,
    pub pipe: PipeConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let t = &self.thresholds;
        let positive = [
            ("thresholds.attach_pressure_n_m2", t.attach_pressure_n_m2),
            ("thresholds.bendable_infill_below", t.bendable_infill_below),
            ("thresholds.max_deflection_deg", t.max_deflection_deg),
            ("thresholds.nonlinear_infill_below", t.nonlinear_infill_below),
            ("rpm", self.rpm),
            ("max_thrust_n", self.max_thrust_n),
            ("envelope_step", self.envelope_step),
            ("pipe.diameter_m", self.pipe.diameter_m),
            ("pipe.contact_width_m", self.pipe.contact_width_m),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(format!("{name} must be positive, got {v}"));
        }
        if !(self.pipe.tendon_force_n >= 0.0 && self.pipe.tendon_force_n.is_finite()) {
            return Err("pipe.tendon_force_n must be >= 0".into());
        }
        if self.infill_rates.is_empty() {
            return Err("infill_rates is empty".into());
        }
        if self.elastica_throttles.iter().any(|t| !(0.0..=crate::deflection::MAX_THROTTLE).contains(t)) {
            return Err("elastica_throttles must lie in [0, 10]".into());
        }
        Ok(())
    }

    /// Thrust for a throttle setting, N.
    pub fn thrust_at(&self, throttle: f64) -> f64 {
        self.max_thrust_n * (throttle / crate::deflection::MAX_THROTTLE).powi(2)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Reads inputs relative to a config file (or from the shipped defaults) and
/// records a digest of everything read.
#[derive(Debug, Clone)]
pub struct InputSet {
    base: Option<PathBuf>,
    digests: BTreeMap<String, String>,
}

impl InputSet {
    pub fn shipped() -> Self {
        Self { base: None, digests: BTreeMap::new() }
    }

    pub fn relative_to(config_path: &Path) -> Self {
        let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self { base: Some(base), digests: BTreeMap::new() }
    }

    /// Loads and validates the config this set resolves against.
    pub fn load_config(&mut self, config_path: Option<&Path>) -> Result<RunConfig, InputError> {
        let (name, text) = match config_path {
            Some(p) => (p.display().to_string(), read_file(p)?),
            None => (DEFAULT_CONFIG_NAME.to_string(), embedded(DEFAULT_CONFIG_NAME).unwrap().to_string()),
        };
        self.record("config", &text);
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| InputError::new(&name, Some(e.line() as u64), e.to_string()))?;
        cfg.validate().map_err(|m| InputError::new(&name, None, m))?;
        Ok(cfg)
    }

    /// Reads `path` and records its digest under `label`. Returns the display name and text.
    pub fn read(&mut self, label: &str, path: &str) -> Result<(String, String), InputError> {
        let (name, text) = match &self.base {
            Some(base) => {
                let full = base.join(path);
                (full.display().to_string(), read_file(&full)?)
            }
            None => {
                let text = embedded(path).ok_or_else(|| InputError::new(path, None, "not a shipped data file"))?;
                (path.to_string(), text.to_string())
            }
        };
        self.record(label, &text);
        Ok((name, text))
    }

    /// Reads a file given on the command line (relative to the working directory).
    pub fn read_external(&mut self, label: &str, path: &Path) -> Result<(String, String), InputError> {
        let text = read_file(path)?;
        self.record(label, &text);
        Ok((path.display().to_string(), text))
    }

    pub fn record(&mut self, label: &str, text: &str) {
        self.digests.insert(label.to_string(), sha256_hex(text.as_bytes()));
    }

    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }
}

fn embedded(name: &str) -> Option<&'static str> {
    EMBEDDED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn read_file(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::new(&path.display().to_string(), None, e.to_string()))
}

/// Shipped default data file by name, e.g. `efficiency.csv`.
pub fn shipped_file(name: &str) -> Option<&'static str> {
    embedded(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_is_valid() {
        let mut inputs = InputSet::shipped();
        let cfg = inputs.load_config(None).unwrap();
        assert_eq!(cfg.infill_rates, vec![6.0, 8.0, 10.0]);
        assert_eq!(cfg.thresholds, Thresholds::default());
        let (_, text) = inputs.read("efficiency_table", &cfg.efficiency_table).unwrap();
        assert!(text.starts_with("rpm,eta\n"));
        assert_eq!(inputs.digests().len(), 2);
        assert!(inputs.digests()["config"].starts_with("sha256:"));
    }

    #[test]
    fn thrust_map_reaches_max_at_full_throttle() {
        let cfg = InputSet::shipped().load_config(None).unwrap();
        assert_eq!(cfg.thrust_at(10.0), cfg.max_thrust_n);
        assert!((cfg.thrust_at(8.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
