//! Builds report sections and sweep tables from a run configuration.

use std::fmt;

use serde::Serialize;

use crate::adapt::{attach_check_with, contact_pressure, recommend_infill_with, wrap_geometry, AdaptError, PipeSpec};
use crate::aero::{
    net_vertical_thrust, EfficiencyCalibration, EfficiencyModel, EfficiencyTable, TABLE_ARM_ANGLE_LIMIT_DEG,
};
use crate::beam::{
    max_stress_station, solve_elastica, ArmGeometry, BeamError, BeamMaterial, LoadCase, ModulusMode,
    LARGE_DEFLECTION_RATIO,
};
use crate::config::{InputSet, MaterialSource, RunConfig};
use crate::deflection::{
    compare_to_elastica, envelope_check_with, eval_deflection, fit_deflection_coeffs, DeflectionError,
    DeflectionModelCoeffs, DeflectionSample, ElasticaSetup, MAX_THROTTLE, PERCENT_PER_THROTTLE_UNIT,
};
use crate::io::{
    read_efficiency_csv, read_flexural_csv, read_stress_strain_csv, ArmGeometryFile, DeflectionCoeffsFile, InputError,
    MooneyRivlinTableFile,
};
use crate::material::{
    fit_flexural_modulus, fit_mooney_rivlin, mr_small_strain_modulus, BeamTestGeometry, FlexuralSample,
    MooneyRivlinParams, StressStrainCurve,
};
use crate::report::{
    codes, BeamSection, BeamSummary, ComparisonRow, DeflectionFitBlock, DeflectionPoint, DeflectionSection,
    EfficiencySection, EnvelopeRow, FlexuralBlock, InfillRangeBlock, MaterialSection, MooneyRivlinBlock,
    PipeFitSection, Report,
};

/// Failure of a command, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Input(String),
    Fit(String),
    Solver { throttle: Option<f64>, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 2,
            RunError::Fit(_) => 3,
            RunError::Solver { .. } => 4,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(m) => write!(f, "input error: {m}"),
            RunError::Fit(m) => write!(f, "fit failure: {m}"),
            RunError::Solver { throttle: Some(t), message } => write!(f, "solver failure at throttle {t}: {message}"),
            RunError::Solver { throttle: None, message } => write!(f, "solver failure: {message}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<InputError> for RunError {
    fn from(e: InputError) -> Self {
        RunError::Input(e.to_string())
    }
}

fn beam_error(e: BeamError, throttle: Option<f64>) -> RunError {
    match e {
        BeamError::NoConvergence { .. } => RunError::Solver { throttle, message: e.to_string() },
        BeamError::NonPhysicalMaterial(_) => RunError::Fit(format!("NonPhysical: {e}")),
        other => RunError::Input(other.to_string()),
    }
}

fn deflection_error(e: DeflectionError) -> RunError {
    match e {
        DeflectionError::Solver { throttle, source } => beam_error(source, Some(throttle)),
        DeflectionError::RankDeficient(_) => RunError::Fit(e.to_string()),
        other => RunError::Input(other.to_string()),
    }
}

pub fn load_geometry(inputs: &mut InputSet, cfg: &RunConfig, report: &mut Report) -> Result<ArmGeometry, RunError> {
    let (name, text) = inputs.read("geometry", &cfg.geometry)?;
    let file = ArmGeometryFile::parse(&name, &text)?;
    if !file.placeholder_fields.is_empty() {
        report.warn(
            codes::PLACEHOLDER_SECTION,
            format!("geometry fields hold stand-in values: {}", file.placeholder_fields.join(", ")),
        );
    }
    file.to_geometry().map_err(|e| RunError::Input(format!("{name}: {e}")))
}

pub fn load_efficiency_table(inputs: &mut InputSet, cfg: &RunConfig) -> Result<EfficiencyTable, RunError> {
    let (name, text) = inputs.read("efficiency_table", &cfg.efficiency_table)?;
    Ok(read_efficiency_csv(&name, &text)?)
}

pub fn load_deflection_coeffs(inputs: &mut InputSet, cfg: &RunConfig) -> Result<DeflectionModelCoeffs, RunError> {
    let (name, text) = inputs.read("deflection_coeffs", &cfg.deflection_coeffs)?;
    Ok(DeflectionCoeffsFile::parse(&name, &text)?.coeffs())
}

/// Bending material plus its report block. `infill` is known for table rows only.
pub struct LoadedMaterial {
    pub material: BeamMaterial,
    pub infill: Option<f64>,
    pub section: MaterialSection,
}

fn mooney_rivlin_block(params: &MooneyRivlinParams, infill: Option<f64>) -> MooneyRivlinBlock {
    MooneyRivlinBlock {
        unit: "MPa",
        infill_percent: infill,
        c10: params.c10,
        c01: params.c01,
        c20: params.c20,
        c02: params.c02,
        c11: params.c11,
        residual_norm_mpa: None,
        condition: None,
        samples_used: None,
    }
}

fn mooney_rivlin_material(
    params: MooneyRivlinParams,
    mode: ModulusMode,
    infill: Option<f64>,
    source: String,
    block: MooneyRivlinBlock,
) -> Result<LoadedMaterial, RunError> {
    let e0 = mr_small_strain_modulus(&params);
    if e0.non_physical {
        return Err(RunError::Fit(format!("NonPhysical: small-strain modulus {} MPa <= 0 for {source}", e0.mpa)));
    }
    Ok(LoadedMaterial {
        material: BeamMaterial::MooneyRivlin { params, mode },
        infill,
        section: MaterialSection {
            source,
            youngs_modulus_pa: e0.pascals(),
            flexural: None,
            mooney_rivlin: Some(block),
        },
    })
}

/// Fits Mooney-Rivlin coefficients to a uniaxial curve.
pub fn fit_curve(curve: &StressStrainCurve, source: String, mode: ModulusMode) -> Result<LoadedMaterial, RunError> {
    let fit = fit_mooney_rivlin(curve).map_err(|e| RunError::Fit(format!("{source}: {e}")))?;
    let block = MooneyRivlinBlock {
        residual_norm_mpa: Some(fit.residual_norm),
        condition: Some(fit.condition),
        samples_used: Some(fit.samples_used),
        ..mooney_rivlin_block(&fit.params, None)
    };
    mooney_rivlin_material(fit.params, mode, None, source, block)
}

/// Flexural modulus from a cantilever test.
pub fn fit_flexural(
    samples: &[FlexuralSample],
    length: f64,
    inertia: f64,
    source: String,
) -> Result<LoadedMaterial, RunError> {
    let geometry = BeamTestGeometry::new(length, inertia).map_err(|e| RunError::Input(e.to_string()))?;
    let e = fit_flexural_modulus(samples, &geometry).map_err(|e| RunError::Fit(format!("{source}: {e}")))?;
    let material = BeamMaterial::with_modulus(e).map_err(|e| beam_error(e, None))?;
    Ok(LoadedMaterial {
        material,
        infill: None,
        section: MaterialSection {
            source,
            youngs_modulus_pa: e,
            flexural: Some(FlexuralBlock { youngs_modulus_pa: e, samples: samples.len() }),
            mooney_rivlin: None,
        },
    })
}

pub fn load_material(inputs: &mut InputSet, cfg: &RunConfig) -> Result<LoadedMaterial, RunError> {
    match &cfg.material {
        MaterialSource::Table { path, infill_percent, modulus_mode } => {
            let (name, text) = inputs.read("material", path)?;
            let table = MooneyRivlinTableFile::parse(&name, &text)?;
            let row = table
                .row(*infill_percent)
                .ok_or_else(|| RunError::Input(format!("{name}: no row for infill {infill_percent}%")))?;
            let params = row.params();
            let block = mooney_rivlin_block(&params, Some(*infill_percent));
            mooney_rivlin_material(params, *modulus_mode, Some(*infill_percent), format!("table:{path}"), block)
        }
        MaterialSource::Coefficients { c10, c01, c20, c02, c11, modulus_mode } => {
            let params = MooneyRivlinParams::new(*c10, *c01, *c20, *c02, *c11);
            let block = mooney_rivlin_block(&params, None);
            mooney_rivlin_material(params, *modulus_mode, None, "coefficients".into(), block)
        }
        MaterialSource::StressStrainCsv { path, modulus_mode } => {
            let (name, text) = inputs.read("material", path)?;
            let curve = read_stress_strain_csv(&name, &text)?;
            fit_curve(&curve, format!("stress_strain:{path}"), *modulus_mode)
        }
        MaterialSource::FlexuralCsv { path, length_m, inertia_m4 } => {
            let (name, text) = inputs.read("material", path)?;
            let samples = read_flexural_csv(&name, &text)?;
            fit_flexural(&samples, *length_m, *inertia_m4, format!("flexural:{path}"))
        }
    }
}

pub fn beam_section(
    cfg: &RunConfig,
    geometry: &ArmGeometry,
    material: &LoadedMaterial,
    coeffs: &DeflectionModelCoeffs,
    report: &mut Report,
) -> Result<BeamSection, RunError> {
    let infill = material.infill.unwrap_or(cfg.infill_rates[0]);
    let base_loads = LoadCase::default();
    let setup =
        ElasticaSetup { geometry, material: &material.material, base_loads: &base_loads, settings: &cfg.solver };
    let comparison = compare_to_elastica(coeffs, infill, &setup, |t| cfg.thrust_at(t), &cfg.elastica_throttles)
        .map_err(deflection_error)?;

    let thrust = cfg.thrust_at(MAX_THROTTLE);
    let sol = solve_elastica(geometry, &material.material, &LoadCase { thrust, ..base_loads }, &cfg.solver)
        .map_err(|e| beam_error(e, Some(MAX_THROTTLE)))?;
    let station = max_stress_station(&sol);
    if sol.contact_expected {
        report.warn(codes::CONTACT_EXPECTED, "arm turns past its fold design at full throttle");
    }
    let tip = *sol.tip();
    let root_theta = sol.stations[0].theta;
    let offset = (tip.z * root_theta.cos() - tip.x * root_theta.sin()).abs() / geometry.total_length();
    if offset > LARGE_DEFLECTION_RATIO {
        report.warn(
            codes::LARGE_DEFLECTION,
            format!("full-throttle tip leaves the root tangent by {:.3} of the arm length", offset),
        );
    }

    let mode = match material.material {
        BeamMaterial::MooneyRivlin { mode, .. } => mode,
        BeamMaterial::Linear(_) => ModulusMode::SmallStrain,
    };
    Ok(BeamSection {
        infill_percent: material.infill,
        modulus_mode: mode,
        full_throttle: BeamSummary {
            throttle: MAX_THROTTLE,
            thrust_n: thrust,
            tip_angle_deg: sol.tip_angle,
            tip_x_m: tip.x,
            tip_z_m: tip.z,
            max_curvature_per_m: sol.max_curvature,
            max_curvature_station_m: sol.max_curvature_station,
            max_stress_station_m: station,
            max_stress_segment: geometry.segment_at(station),
            max_fiber_strain: sol.max_fiber_strain,
            root_moment_n_m: sol.root_moment,
            residual_n_m: sol.residual,
            shooting_iterations: sol.shooting_iterations,
            contact_expected: sol.contact_expected,
        },
        comparison: comparison
            .rows
            .iter()
            .map(|r| ComparisonRow {
                throttle: r.throttle,
                thrust_n: r.thrust,
                alpha_empirical_deg: r.alpha_empirical,
                alpha_simulated_deg: r.alpha_simulated,
                discrepancy_deg: r.discrepancy,
            })
            .collect(),
        max_abs_discrepancy_deg: comparison.max_abs_discrepancy,
    })
}

pub fn efficiency_model(table: &EfficiencyTable) -> Result<EfficiencyModel, RunError> {
    EfficiencyModel::calibrate(table.clone(), EfficiencyCalibration::default())
        .map_err(|e| RunError::Fit(e.to_string()))
}

pub fn efficiency_section(
    cfg: &RunConfig,
    table: &EfficiencyTable,
    rpm: f64,
    motor_station: f64,
    arm_angle_deg: f64,
    report: &mut Report,
) -> Result<EfficiencySection, RunError> {
    if !(rpm > 0.0 && rpm.is_finite()) {
        return Err(RunError::Input(format!("rpm {rpm} must be > 0")));
    }
    let rows = table.rows();
    if rpm < rows[0].0 || rpm > rows[rows.len() - 1].0 {
        report.warn(codes::RPM_OUTSIDE_TABLE, format!("{rpm} rpm outside the table; end value used"));
    }
    if arm_angle_deg.abs() > TABLE_ARM_ANGLE_LIMIT_DEG {
        report.warn(
            codes::ARM_ANGLE_OUTSIDE_TABLE,
            format!("arm angle {arm_angle_deg} deg beyond the {TABLE_ARM_ANGLE_LIMIT_DEG} deg range of the table"),
        );
    }
    let model = efficiency_model(table)?;
    let eta = table.lookup(rpm);
    let eta_model = model.eval(motor_station, rpm).map_err(|e| RunError::Input(e.to_string()))?;
    let propeller = cfg.propeller.model().map_err(|e| RunError::Input(e.to_string()))?;
    let thrust = propeller.thrust_coefficient * rpm * rpm;
    let net = net_vertical_thrust(thrust, arm_angle_deg, eta).map_err(|e| RunError::Input(e.to_string()))?;
    Ok(EfficiencySection {
        rpm,
        eta,
        motor_station,
        eta_model,
        optimum_station: model.optimum_station(rpm),
        thrust_n: thrust,
        arm_angle_deg,
        net_vertical_thrust_n: net,
    })
}

pub fn deflection_section(
    cfg: &RunConfig,
    coeffs: &DeflectionModelCoeffs,
    infills: &[f64],
    report: &mut Report,
) -> Result<DeflectionSection, RunError> {
    let limits = cfg.thresholds.envelope_limits();
    let mut envelopes = Vec::with_capacity(infills.len());
    for &rho in infills {
        let env =
            envelope_check_with(coeffs, rho, MAX_THROTTLE, cfg.envelope_step, &limits).map_err(deflection_error)?;
        if env.nonlinear_flag {
            report.warn(codes::NONLINEAR_REGIME, format!("infill {rho}% is outside the near-linear regime"));
        }
        if !env.passes_14deg {
            report.warn(
                codes::ENVELOPE_EXCEEDED,
                format!("infill {rho}% deflects {:.3} deg at throttle {}", env.max_abs_deflection, env.worst_throttle),
            );
        }
        envelopes.push(EnvelopeRow {
            infill_percent: rho,
            max_abs_deflection_deg: env.max_abs_deflection,
            worst_throttle: env.worst_throttle,
            nonlinear_flag: env.nonlinear_flag,
            passes_14deg: env.passes_14deg,
        });
    }
    let recommended = match recommend_infill_with(coeffs, coeffs.alpha0, &limits, &cfg.thresholds.attachment_rules()) {
        Ok(r) => Some(InfillRangeBlock { lo_percent: r.lo, hi_percent: r.hi }),
        Err(e) => {
            report.warn(codes::NO_RECOMMENDED_INFILL, e.to_string());
            None
        }
    };
    Ok(DeflectionSection {
        coefficients: DeflectionCoeffsFile::from_coeffs(coeffs),
        fit: None,
        envelopes,
        recommended_infill: recommended,
        points: Vec::new(),
    })
}

/// Refits coefficients from a measured sweep, keeping `alpha0`.
pub fn fit_sweep(
    samples: &[DeflectionSample],
    alpha0: f64,
) -> Result<(DeflectionModelCoeffs, DeflectionFitBlock), RunError> {
    let fit = fit_deflection_coeffs(samples, alpha0).map_err(deflection_error)?;
    Ok((
        fit.coeffs,
        DeflectionFitBlock { residual_norm_deg: fit.residual_norm, condition: fit.condition, samples: samples.len() },
    ))
}

pub fn deflection_points(
    coeffs: &DeflectionModelCoeffs,
    infills: &[f64],
    throttle_pct: &[f64],
) -> Result<Vec<DeflectionPoint>, RunError> {
    let mut points = Vec::new();
    for &rho in infills {
        for &pct in throttle_pct {
            let t = pct / PERCENT_PER_THROTTLE_UNIT;
            let e = eval_deflection(coeffs, rho, t).map_err(deflection_error)?;
            points.push(DeflectionPoint {
                infill_percent: rho,
                throttle: t,
                alpha_deg: e.angle,
                out_of_envelope: e.out_of_envelope,
            });
        }
    }
    Ok(points)
}

fn adapt_error(e: AdaptError) -> RunError {
    RunError::Input(e.to_string())
}

/// Contact pressure of the wrapped arm and the contact arc it acts over.
pub fn wrap_pressure(
    geometry: &ArmGeometry,
    cfg: &RunConfig,
) -> Result<(crate::adapt::WrapResult, f64, f64), RunError> {
    let pipe = PipeSpec::new(cfg.pipe.diameter_m).map_err(adapt_error)?;
    let wrap = wrap_geometry(geometry, &pipe).map_err(adapt_error)?;
    let arc = wrap.contact_arc_length(&pipe);
    let pressure = contact_pressure(cfg.pipe.tendon_force_n, cfg.pipe.contact_width_m, arc).map_err(adapt_error)?;
    Ok((wrap, arc, pressure))
}

pub fn pipe_fit_section(
    cfg: &RunConfig,
    geometry: &ArmGeometry,
    infill: f64,
    report: &mut Report,
) -> Result<PipeFitSection, RunError> {
    let (wrap, arc, pressure) = wrap_pressure(geometry, cfg)?;
    let verdict = attach_check_with(&cfg.thresholds.attachment_rules(), infill, pressure);
    if !verdict.attached {
        report.warn(
            codes::NOT_ATTACHED,
            format!("infill {infill}% at {pressure:.1} N/m^2 does not attach (bendable: {})", verdict.bendable),
        );
    }
    Ok(PipeFitSection {
        diameter_m: cfg.pipe.diameter_m,
        infill_percent: infill,
        tendon_force_n: cfg.pipe.tendon_force_n,
        contact_width_m: cfg.pipe.contact_width_m,
        contact_arc_length_m: arc,
        per_segment_subtended_deg: wrap.per_segment_subtended,
        total_turning_deg: wrap.total_turning,
        coverage_ratio: wrap.coverage_ratio,
        max_gap_m: wrap.max_gap,
        pressure_n_m2: pressure,
        bendable: verdict.bendable,
        attached: verdict.attached,
    })
}

/// The full pipeline: material, elastica comparison, efficiency, envelope and pipe fit.
pub fn analyze(inputs: &mut InputSet, cfg: &RunConfig, rpm: f64) -> Result<Report, RunError> {
    let mut report = Report::new("analyze");
    let geometry = load_geometry(inputs, cfg, &mut report)?;
    let material = load_material(inputs, cfg)?;
    let table = load_efficiency_table(inputs, cfg)?;
    let coeffs = load_deflection_coeffs(inputs, cfg)?;

    let beam = beam_section(cfg, &geometry, &material, &coeffs, &mut report)?;
    let efficiency =
        efficiency_section(cfg, &table, rpm, geometry.motor_station(), geometry.initial_droop_deg(), &mut report)?;
    let deflection = deflection_section(cfg, &coeffs, &cfg.infill_rates, &mut report)?;
    let infill = material.infill.unwrap_or(cfg.infill_rates[0]);
    let pipe_fit = pipe_fit_section(cfg, &geometry, infill, &mut report)?;

    report.material = Some(material.section);
    report.beam = Some(beam);
    report.efficiency = Some(efficiency);
    report.deflection = Some(deflection);
    report.pipe_fit = Some(pipe_fit);
    report.inputs = inputs.digests().clone();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Array of row objects keyed by column name.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), serde_json::to_value(v).expect("cell serializes")))
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    MotorStation,
    ArmAngle,
    Throttle,
    Infill,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub rpm: f64,
    pub rho: f64,
    pub tendon_force: f64,
}

/// `start + k*step` for `k = 0..=n`, rounded to 1e-9 so grid labels print cleanly.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9).collect()
}

pub fn sweep(inputs: &mut InputSet, cfg: &RunConfig, axis: SweepAxis, params: SweepParams) -> Result<Table, RunError> {
    let mut scratch = Report::new("sweep");
    match axis {
        SweepAxis::MotorStation => {
            let model = efficiency_model(&load_efficiency_table(inputs, cfg)?)?;
            let rows = grid(0.3, 1.0, 0.01)
                .into_iter()
                .map(|x| {
                    Ok(vec![
                        Cell::Num(x),
                        Cell::Num(model.eval(x, params.rpm).map_err(|e| RunError::Input(e.to_string()))?),
                    ])
                })
                .collect::<Result<_, RunError>>()?;
            Ok(Table { columns: vec!["motor_station", "eta"], rows })
        }
        SweepAxis::ArmAngle => {
            let table = load_efficiency_table(inputs, cfg)?;
            let propeller = cfg.propeller.model().map_err(|e| RunError::Input(e.to_string()))?;
            let eta = table.lookup(params.rpm);
            let thrust = propeller.thrust_coefficient * params.rpm * params.rpm;
            let rows = grid(0.0, TABLE_ARM_ANGLE_LIMIT_DEG, 1.0)
                .into_iter()
                .map(|a| {
                    let net = net_vertical_thrust(thrust, a, eta).map_err(|e| RunError::Input(e.to_string()))?;
                    Ok(vec![Cell::Num(a), Cell::Num(thrust), Cell::Num(eta), Cell::Num(net)])
                })
                .collect::<Result<_, RunError>>()?;
            Ok(Table { columns: vec!["arm_angle_deg", "thrust_n", "eta", "net_vertical_thrust_n"], rows })
        }
        SweepAxis::Throttle => {
            let coeffs = load_deflection_coeffs(inputs, cfg)?;
            let rows = grid(0.0, MAX_THROTTLE, 0.1)
                .into_iter()
                .map(|t| {
                    let e = eval_deflection(&coeffs, params.rho, t).map_err(deflection_error)?;
                    Ok(vec![
                        Cell::Num(t),
                        Cell::Num(((t * PERCENT_PER_THROTTLE_UNIT) * 1e9).round() / 1e9),
                        Cell::Num(cfg.thrust_at(t)),
                        Cell::Num(e.angle),
                        Cell::Bool(e.out_of_envelope),
                    ])
                })
                .collect::<Result<_, RunError>>()?;
            Ok(Table { columns: vec!["throttle", "throttle_pct", "thrust_n", "alpha_deg", "out_of_envelope"], rows })
        }
        SweepAxis::Infill => {
            let coeffs = load_deflection_coeffs(inputs, cfg)?;
            let geometry = load_geometry(inputs, cfg, &mut scratch)?;
            let cfg = RunConfig {
                pipe: crate::config::PipeConfig { tendon_force_n: params.tendon_force, ..cfg.pipe },
                ..cfg.clone()
            };
            let (_, _, pressure) = wrap_pressure(&geometry, &cfg)?;
            let limits = cfg.thresholds.envelope_limits();
            let rules = cfg.thresholds.attachment_rules();
            let rows = grid(4.0, 20.0, 0.5)
                .into_iter()
                .map(|rho| {
                    let env = envelope_check_with(&coeffs, rho, MAX_THROTTLE, cfg.envelope_step, &limits)
                        .map_err(deflection_error)?;
                    let v = attach_check_with(&rules, rho, pressure);
                    Ok(vec![
                        Cell::Num(rho),
                        Cell::Num(env.max_abs_deflection),
                        Cell::Bool(env.passes_14deg),
                        Cell::Bool(env.nonlinear_flag),
                        Cell::Bool(v.bendable),
                        Cell::Num(pressure),
                        Cell::Bool(v.attached),
                    ])
                })
                .collect::<Result<_, RunError>>()?;
            Ok(Table {
                columns: vec![
                    "rho_percent",
                    "max_abs_deflection_deg",
                    "passes_14deg",
                    "nonlinear_flag",
                    "bendable",
                    "pressure_n_m2",
                    "attached",
                ],
                rows,
            })
        }
    }
}
