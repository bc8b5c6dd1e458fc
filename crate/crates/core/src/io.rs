//! File formats: CSV inputs, the arm geometry JSON and solution export.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::aero::EfficiencyTable;
use crate::beam::{ArmGeometry, BeamSolution, Segment};
use crate::deflection::{DeflectionModelCoeffs, DeflectionSample, PERCENT_PER_THROTTLE_UNIT, THROTTLE_UNIT_LABEL};
use crate::material::{FlexuralSample, MooneyRivlinParams, StressStrainCurve};

pub const STRESS_STRAIN_HEADER: [&str; 2] = ["strain", "stress_pa"];
pub const FLEXURAL_HEADER: [&str; 2] = ["force_n", "deflection_m"];
pub const EFFICIENCY_HEADER: [&str; 2] = ["rpm", "eta"];
pub const DEFLECTION_SWEEP_HEADER: [&str; 3] = ["rho_percent", "throttle_pct", "alpha_deg"];
pub const SOLUTION_HEADER: [&str; 4] = ["s_m", "x_m", "z_m", "theta_rad"];

/// A malformed input, located by source name and (when known) 1-based line.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub source: String,
    pub line: Option<u64>,
    pub message: String,
}

impl InputError {
    pub fn new(source: &str, line: Option<u64>, message: impl Into<String>) -> Self {
        Self { source: source.to_string(), line, message: message.into() }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}: line {}: {}", self.source, line, self.message),
            None => write!(f, "{}: {}", self.source, self.message),
        }
    }
}

impl std::error::Error for InputError {}

/// Parses a numeric CSV with an exact header. Returns rows with their line numbers.
pub fn read_numeric_csv<const N: usize>(
    source: &str,
    text: &str,
    header: [&str; N],
) -> Result<Vec<([f64; N], u64)>, InputError> {
    let expected = header.join(",");
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());

    let found = reader.headers().map_err(|e| InputError::new(source, Some(1), e.to_string()))?.clone();
    if found.is_empty() || found.iter().all(str::is_empty) {
        return Err(InputError::new(source, Some(1), format!("missing header `{expected}`")));
    }
    if found.len() != N || found.iter().zip(header).any(|(a, b)| a != b) {
        let got: Vec<&str> = found.iter().collect();
        return Err(InputError::new(
            source,
            Some(1),
            format!("expected header `{expected}`, found `{}`", got.join(",")),
        ));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            InputError::new(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = [0.0; N];
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                InputError::new(source, Some(line), format!("`{field}` in column `{}` is not a number", header[k]))
            })?;
            if !v.is_finite() {
                return Err(InputError::new(source, Some(line), format!("non-finite value in column `{}`", header[k])));
            }
            row[k] = v;
        }
        rows.push((row, line));
    }
    if rows.is_empty() {
        return Err(InputError::new(source, Some(2), "no data rows"));
    }
    Ok(rows)
}

pub fn read_stress_strain_csv(source: &str, text: &str) -> Result<StressStrainCurve, InputError> {
    let rows = read_numeric_csv(source, text, STRESS_STRAIN_HEADER)?;
    let samples = rows.iter().map(|(r, _)| (r[0], r[1])).collect();
    StressStrainCurve::new(samples).map_err(|e| InputError::new(source, None, e.to_string()))
}

pub fn read_flexural_csv(source: &str, text: &str) -> Result<Vec<FlexuralSample>, InputError> {
    let rows = read_numeric_csv(source, text, FLEXURAL_HEADER)?;
    Ok(rows.iter().map(|(r, _)| FlexuralSample::new(r[0], r[1])).collect())
}

pub fn read_efficiency_csv(source: &str, text: &str) -> Result<EfficiencyTable, InputError> {
    let rows = read_numeric_csv(source, text, EFFICIENCY_HEADER)?;
    EfficiencyTable::new(rows.iter().map(|(r, _)| (r[0], r[1])).collect())
        .map_err(|e| InputError::new(source, None, e.to_string()))
}

/// Throttle percent is converted to throttle units.
pub fn read_deflection_sweep_csv(source: &str, text: &str) -> Result<Vec<DeflectionSample>, InputError> {
    let rows = read_numeric_csv(source, text, DEFLECTION_SWEEP_HEADER)?;
    Ok(rows
        .iter()
        .map(|(r, _)| DeflectionSample { infill_rate: r[0], throttle: r[1] / PERCENT_PER_THROTTLE_UNIT, angle: r[2] })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub beta_deg: f64,
    pub length_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmGeometryFile {
    pub segments: Vec<SegmentSpec>,
    pub inertia_m4: Vec<f64>,
    pub half_depth_m: f64,
    pub alpha0_deg: f64,
    pub motor_station: f64,
    pub linear_density_kg_m: f64,
    /// Names of fields holding stand-in values rather than measurements.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub placeholder_fields: Vec<String>,
}

impl ArmGeometryFile {
    pub fn parse(source: &str, text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::new(source, Some(e.line() as u64), e.to_string()))
    }

    pub fn to_geometry(&self) -> Result<ArmGeometry, crate::beam::BeamError> {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { fold_angle_deg: s.beta_deg, length: s.length_mm / 1000.0 })
            .collect();
        ArmGeometry::new(
            segments,
            self.inertia_m4.clone(),
            self.half_depth_m,
            self.alpha0_deg,
            self.motor_station,
            self.linear_density_kg_m,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MooneyRivlinRow {
    pub infill_percent: f64,
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c02: f64,
    pub c11: f64,
}

impl MooneyRivlinRow {
    pub fn params(&self) -> MooneyRivlinParams {
        MooneyRivlinParams::new(self.c10, self.c01, self.c20, self.c02, self.c11)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MooneyRivlinTableFile {
    pub unit: String,
    pub rows: Vec<MooneyRivlinRow>,
}

impl MooneyRivlinTableFile {
    pub fn parse(source: &str, text: &str) -> Result<Self, InputError> {
        let table: Self =
            serde_json::from_str(text).map_err(|e| InputError::new(source, Some(e.line() as u64), e.to_string()))?;
        if table.unit != "MPa" {
            return Err(InputError::new(source, None, format!("unsupported unit `{}`, expected MPa", table.unit)));
        }
        Ok(table)
    }

    pub fn row(&self, infill: f64) -> Option<&MooneyRivlinRow> {
        self.rows.iter().find(|r| r.infill_percent == infill)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeflectionCoeffsFile {
    pub throttle_unit: String,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub alpha0_deg: f64,
}

impl DeflectionCoeffsFile {
    pub fn parse(source: &str, text: &str) -> Result<Self, InputError> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| InputError::new(source, Some(e.line() as u64), e.to_string()))?;
        if file.throttle_unit != THROTTLE_UNIT_LABEL {
            return Err(InputError::new(
                source,
                None,
                format!("throttle_unit `{}` unsupported, expected `{THROTTLE_UNIT_LABEL}`", file.throttle_unit),
            ));
        }
        Ok(file)
    }

    pub fn coeffs(&self) -> DeflectionModelCoeffs {
        DeflectionModelCoeffs { a1: self.a1, a2: self.a2, b1: self.b1, b2: self.b2, alpha0: self.alpha0_deg }
    }

    pub fn from_coeffs(c: &DeflectionModelCoeffs) -> Self {
        Self {
            throttle_unit: THROTTLE_UNIT_LABEL.to_string(),
            a1: c.a1,
            a2: c.a2,
            b1: c.b1,
            b2: c.b2,
            alpha0_deg: c.alpha0,
        }
    }
}

/// Writes the deformed shape, one row per station. Signed zeros print as `0`.
pub fn write_solution_csv<W: Write>(out: W, solution: &BeamSolution) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SOLUTION_HEADER)?;
    for st in &solution.stations {
        w.write_record([st.s, st.x, st.z, st.theta].map(|v| (v + 0.0).to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_stress_strain() {
        let c = read_stress_strain_csv("c.csv", "strain,stress_pa\n0.01,1000\n0.02, 2100\n").unwrap();
        assert_eq!(c.samples(), &[(0.01, 1000.0), (0.02, 2100.0)]);
    }

    #[test]
    fn empty_and_header_errors_name_line_one() {
        let e = read_stress_strain_csv("c.csv", "").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = read_flexural_csv("f.csv", "force,deflection_m\n1,2\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        assert!(e.to_string().contains("force_n,deflection_m"));
        let e = read_flexural_csv("f.csv", "force_n,deflection_m\n").unwrap_err();
        assert!(e.to_string().contains("no data rows"));
    }

    #[test]
    fn bad_cell_reports_its_line() {
        let e = read_efficiency_csv("e.csv", "rpm,eta\n4000,0.895\n5000,abc\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().starts_with("e.csv: line 3:"));
        let e = read_efficiency_csv("e.csv", "rpm,eta\n4000,0.895,1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn sweep_throttle_is_converted() {
        let s = read_deflection_sweep_csv("d.csv", "rho_percent,throttle_pct,alpha_deg\n6,50,3.2\n").unwrap();
        assert_eq!(s[0].throttle, 5.0);
    }

    #[test]
    fn geometry_round_trip() {
        let text = r#"{"segments":[{"beta_deg":36,"length_mm":35}],"inertia_m4":[1e-9],
            "half_depth_m":0.01,"alpha0_deg":0,"motor_station":0.83,"linear_density_kg_m":0.1}"#;
        let g = ArmGeometryFile::parse("g.json", text).unwrap().to_geometry().unwrap();
        assert!((g.total_length() - 0.035).abs() < 1e-15);
        assert!(ArmGeometryFile::parse("g.json", "{").is_err());
    }

    #[test]
    fn solution_export_header() {
        let g = ArmGeometryFile::parse(
            "g",
            r#"{"segments":[{"beta_deg":0,"length_mm":100}],"inertia_m4":[1e-9],"half_depth_m":0.01,
               "alpha0_deg":0,"motor_station":1,"linear_density_kg_m":0}"#,
        )
        .unwrap()
        .to_geometry()
        .unwrap();
        let sol = crate::beam::solve_elastica(
            &g,
            &crate::beam::BeamMaterial::with_modulus(1e6).unwrap(),
            &crate::beam::LoadCase::unloaded(),
            &Default::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_solution_csv(&mut buf, &sol).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s_m,x_m,z_m,theta_rad\n0,0,0,0\n"));
        assert_eq!(text.lines().count(), sol.stations.len() + 1);
    }
}
