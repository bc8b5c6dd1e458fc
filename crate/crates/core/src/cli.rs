//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 input error, 3 fit failure, 4 solver failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::beam::{solve_elastica, LoadCase, ModulusMode};
use crate::config::{InputSet, RunConfig};
use crate::io::{
    read_deflection_sweep_csv, read_efficiency_csv, read_flexural_csv, read_stress_strain_csv, write_solution_csv,
};
use crate::material::StressStrainCurve;
use crate::pipeline::{self, RunError, SweepAxis, SweepParams};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "softarm", version, about = "Design analysis for folded soft propeller arms")]
pub struct Cli {
    /// Run configuration (JSON). Defaults to the shipped data set.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Add a generation timestamp to reports. Reports are otherwise byte-reproducible.
    #[arg(long, global = true)]
    pub timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a flexural modulus or Mooney-Rivlin coefficients to test data.
    FitMaterial(FitMaterialArgs),
    /// Run the full pipeline on the configured arm.
    Analyze(AnalyzeArgs),
    /// Evaluate the empirical deflection law and its envelope.
    Deflect(DeflectArgs),
    /// Efficiency lookup and surrogate at one operating point.
    Efficiency(EfficiencyArgs),
    /// Wrap the arm on a pipe and check attachment.
    PipeFit(PipeFitArgs),
    /// Tabulate one quantity along a design axis.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct FitMaterialArgs {
    /// Uniaxial curve, header `strain,stress_pa`.
    #[arg(long, conflicts_with = "flexural", required_unless_present = "flexural")]
    pub stress_strain: Option<PathBuf>,
    /// Cantilever test, header `force_n,deflection_m`.
    #[arg(long, requires_all = ["length", "inertia"])]
    pub flexural: Option<PathBuf>,
    /// Specimen length, m.
    #[arg(long)]
    pub length: Option<f64>,
    /// Specimen second moment of area, m^4.
    #[arg(long)]
    pub inertia: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub rpm: Option<f64>,
    /// Also write shape, comparison and envelope CSVs here.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeflectArgs {
    /// Infill rates, percent. Defaults to the configured rates.
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    /// Throttle settings to evaluate, percent.
    #[arg(long, value_delimiter = ',')]
    pub throttle_pct: Vec<f64>,
    /// Refit the coefficients to a sweep with header `rho_percent,throttle_pct,alpha_deg`.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Zero-throttle angle, deg. Overrides the coefficient file.
    #[arg(long)]
    pub alpha0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long)]
    pub rpm: Option<f64>,
    /// Motor station x/c. Defaults to the arm geometry.
    #[arg(long)]
    pub station: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub arm_angle: f64,
    /// Efficiency table, header `rpm,eta`. Overrides the configured table.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipeFitArgs {
    /// m
    #[arg(long)]
    pub diameter: Option<f64>,
    /// N
    #[arg(long)]
    pub tendon_force: Option<f64>,
    /// m
    #[arg(long)]
    pub contact_width: Option<f64>,
    /// Infill rate, percent. Defaults to the first configured rate.
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Axis {
    MotorStation,
    ArmAngle,
    Throttle,
    Infill,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long)]
    pub rpm: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// N
    #[arg(long)]
    pub tendon_force: Option<f64>,
}

enum Output {
    Report(Box<Report>),
    Table(pipeline::Table),
}

/// Parses `args` (including the program name) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let mut inputs = match &cli.config {
        Some(p) => InputSet::relative_to(p),
        None => InputSet::shipped(),
    };
    let cfg = inputs.load_config(cli.config.as_deref())?;

    let output = match &cli.command {
        Command::FitMaterial(a) => Output::Report(Box::new(fit_material(&mut inputs, a)?)),
        Command::Analyze(a) => Output::Report(Box::new(analyze(&mut inputs, &cfg, a)?)),
        Command::Deflect(a) => Output::Report(Box::new(deflect(&mut inputs, &cfg, a)?)),
        Command::Efficiency(a) => Output::Report(Box::new(efficiency(&mut inputs, &cfg, a)?)),
        Command::PipeFit(a) => Output::Report(Box::new(pipe_fit(&mut inputs, &cfg, a)?)),
        Command::Sweep(a) => Output::Table(sweep(&mut inputs, &cfg, a)?),
    };

    let text = match output {
        Output::Report(mut report) => {
            if cli.timestamp {
                report.generated_unix_s =
                    Some(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()));
            }
            if !cli.quiet {
                for w in &report.warnings {
                    eprintln!("warning[{}]: {}", w.code, w.message);
                }
            }
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            }
        }
        Output::Table(table) => match cli.format.unwrap_or(Format::Csv) {
            Format::Json => table.to_json(),
            Format::Csv => table.to_csv(),
        },
    };
    let out = cli.out.as_deref().or(cfg.output.as_deref().map(Path::new));
    emit(out, &text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), RunError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| RunError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| RunError::Input(format!("stdout: {e}")))
        }
    }
}

fn fit_material(inputs: &mut InputSet, a: &FitMaterialArgs) -> Result<Report, RunError> {
    let mut report = Report::new("fit-material");
    let material = if let Some(path) = &a.stress_strain {
        let (name, text) = inputs.read_external("stress_strain", path)?;
        let curve: StressStrainCurve = read_stress_strain_csv(&name, &text)?;
        pipeline::fit_curve(&curve, format!("stress_strain:{name}"), ModulusMode::SmallStrain)?
    } else {
        let path = a.flexural.as_ref().expect("clap enforces one source");
        let (name, text) = inputs.read_external("flexural", path)?;
        let samples = read_flexural_csv(&name, &text)?;
        let length = a.length.expect("clap enforces --length");
        let inertia = a.inertia.expect("clap enforces --inertia");
        pipeline::fit_flexural(&samples, length, inertia, format!("flexural:{name}"))?
    };
    report.material = Some(material.section);
    report.inputs = inputs.digests().clone();
    Ok(report)
}

fn analyze(inputs: &mut InputSet, cfg: &RunConfig, a: &AnalyzeArgs) -> Result<Report, RunError> {
    let report = pipeline::analyze(inputs, cfg, a.rpm.unwrap_or(cfg.rpm))?;
    if let Some(dir) = &a.csv_dir {
        write_analysis_csvs(inputs, cfg, &report, dir)?;
    }
    Ok(report)
}

fn write_analysis_csvs(inputs: &mut InputSet, cfg: &RunConfig, report: &Report, dir: &Path) -> Result<(), RunError> {
    let io_err = |p: &Path, e: &dyn std::fmt::Display| RunError::Input(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, &e))?;

    let mut scratch = Report::new("analyze");
    let geometry = pipeline::load_geometry(inputs, cfg, &mut scratch)?;
    let material = pipeline::load_material(inputs, cfg)?;
    for &t in &cfg.elastica_throttles {
        let loads = LoadCase { thrust: cfg.thrust_at(t), ..LoadCase::default() };
        let sol = solve_elastica(&geometry, &material.material, &loads, &cfg.solver)
            .map_err(|e| RunError::Solver { throttle: Some(t), message: e.to_string() })?;
        let path = dir.join(format!("shape_throttle_{t}.csv"));
        let file = std::fs::File::create(&path).map_err(|e| io_err(&path, &e))?;
        write_solution_csv(file, &sol).map_err(|e| io_err(&path, &e))?;
    }

    if let Some(beam) = &report.beam {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["throttle", "thrust_n", "alpha_empirical_deg", "alpha_simulated_deg", "discrepancy_deg"])
            .expect("in-memory write");
        for r in &beam.comparison {
            w.serialize((r.throttle, r.thrust_n, r.alpha_empirical_deg, r.alpha_simulated_deg, r.discrepancy_deg))
                .expect("in-memory write");
        }
        let path = dir.join("comparison.csv");
        std::fs::write(&path, w.into_inner().expect("in-memory flush")).map_err(|e| io_err(&path, &e))?;
    }

    let coeffs = pipeline::load_deflection_coeffs(inputs, cfg)?;
    let points = pipeline::deflection_points(&coeffs, &cfg.infill_rates, &pipeline::grid(0.0, 100.0, 1.0))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(crate::io::DEFLECTION_SWEEP_HEADER).expect("in-memory write");
    for p in &points {
        w.serialize((p.infill_percent, p.throttle * crate::deflection::PERCENT_PER_THROTTLE_UNIT, p.alpha_deg))
            .expect("in-memory write");
    }
    let path = dir.join("deflection.csv");
    std::fs::write(&path, w.into_inner().expect("in-memory flush")).map_err(|e| io_err(&path, &e))
}

fn deflect(inputs: &mut InputSet, cfg: &RunConfig, a: &DeflectArgs) -> Result<Report, RunError> {
    let mut report = Report::new("deflect");
    let mut coeffs = pipeline::load_deflection_coeffs(inputs, cfg)?;
    if let Some(alpha0) = a.alpha0 {
        coeffs = coeffs.with_alpha0(alpha0);
    }
    let mut fit = None;
    if let Some(path) = &a.sweep {
        let (name, text) = inputs.read_external("deflection_sweep", path)?;
        let samples = read_deflection_sweep_csv(&name, &text)?;
        let (refit, block) = pipeline::fit_sweep(&samples, coeffs.alpha0)?;
        coeffs = refit;
        fit = Some(block);
    }
    let infills = if a.rho.is_empty() { cfg.infill_rates.clone() } else { a.rho.clone() };
    let mut section = pipeline::deflection_section(cfg, &coeffs, &infills, &mut report)?;
    section.fit = fit;
    section.points = pipeline::deflection_points(&coeffs, &infills, &a.throttle_pct)?;
    report.deflection = Some(section);
    report.inputs = inputs.digests().clone();
    Ok(report)
}

fn efficiency(inputs: &mut InputSet, cfg: &RunConfig, a: &EfficiencyArgs) -> Result<Report, RunError> {
    let mut report = Report::new("efficiency");
    let table = match &a.table {
        Some(path) => {
            let (name, text) = inputs.read_external("efficiency_table", path)?;
            read_efficiency_csv(&name, &text)?
        }
        None => pipeline::load_efficiency_table(inputs, cfg)?,
    };
    let station = match a.station {
        Some(x) => x,
        None => pipeline::load_geometry(inputs, cfg, &mut report)?.motor_station(),
    };
    let section =
        pipeline::efficiency_section(cfg, &table, a.rpm.unwrap_or(cfg.rpm), station, a.arm_angle, &mut report)?;
    report.efficiency = Some(section);
    report.inputs = inputs.digests().clone();
    Ok(report)
}

fn pipe_fit(inputs: &mut InputSet, cfg: &RunConfig, a: &PipeFitArgs) -> Result<Report, RunError> {
    let mut report = Report::new("pipe-fit");
    let mut cfg = cfg.clone();
    if let Some(d) = a.diameter {
        cfg.pipe.diameter_m = d;
    }
    if let Some(f) = a.tendon_force {
        cfg.pipe.tendon_force_n = f;
    }
    if let Some(w) = a.contact_width {
        cfg.pipe.contact_width_m = w;
    }
    let geometry = pipeline::load_geometry(inputs, &cfg, &mut report)?;
    let infill = a.rho.unwrap_or(cfg.infill_rates[0]);
    report.pipe_fit = Some(pipeline::pipe_fit_section(&cfg, &geometry, infill, &mut report)?);
    report.inputs = inputs.digests().clone();
    Ok(report)
}

fn sweep(inputs: &mut InputSet, cfg: &RunConfig, a: &SweepArgs) -> Result<pipeline::Table, RunError> {
    let axis = match a.axis {
        Axis::MotorStation => SweepAxis::MotorStation,
        Axis::ArmAngle => SweepAxis::ArmAngle,
        Axis::Throttle => SweepAxis::Throttle,
        Axis::Infill => SweepAxis::Infill,
    };
    let params = SweepParams {
        rpm: a.rpm.unwrap_or(cfg.rpm),
        rho: a.rho.unwrap_or(cfg.infill_rates[0]),
        tendon_force: a.tendon_force.unwrap_or(cfg.pipe.tendon_force_n),
    };
    pipeline::sweep(inputs, cfg, axis, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["softarm", "sweep", "--axis", "motor_station", "--format", "json"]).unwrap();
        assert_eq!(cli.format, Some(Format::Json));
        assert!(matches!(cli.command, Command::Sweep(SweepArgs { axis: Axis::MotorStation, .. })));
    }

    #[test]
    fn unknown_axis_is_a_usage_error() {
        let err = Cli::try_parse_from(["softarm", "sweep", "--axis", "chord"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
