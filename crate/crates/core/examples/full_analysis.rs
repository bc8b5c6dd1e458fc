//! Runs the complete analysis on the shipped data set and prints the JSON report.
//!
//! Run with `cargo run --example full_analysis [config.json]`.

use std::path::PathBuf;

use softarm::config::InputSet;
use softarm::pipeline::analyze;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os().nth(1).map(PathBuf::from);
    let mut inputs = match &path {
        Some(p) => InputSet::relative_to(p),
        None => InputSet::shipped(),
    };
    let cfg = inputs.load_config(path.as_deref())?;
    let report = analyze(&mut inputs, &cfg, cfg.rpm)?;
    for w in &report.warnings {
        eprintln!("warning[{}]: {}", w.code, w.message);
    }
    print!("{}", report.to_json());
    Ok(())
}
