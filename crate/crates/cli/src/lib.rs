//! Configuration, report emission and command dispatch for the `hypmass` binary.

pub mod commands;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::json;

use config::{Overrides, RunConfig, Validated};
use report::{write_json, Report};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or metric; exit 2.
    Schema(String),
    /// A numerical routine failed; exit 3.
    Numerical(String),
    /// Output could not be written; exit 3.
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// Runs a validated configuration and builds its report, without writing files.
pub fn execute(cfg: &Validated) -> Result<(Report, Vec<report::Table>), CliError> {
    let out = commands::run_command(cfg)?;
    let config = json!({
        "command": cfg.command.name(),
        "metric": cfg.metric,
        "numeric": out.numeric,
        "params": out.params,
    });
    let report = Report {
        command: cfg.command.name().into(),
        config,
        results: out.results,
        checks: out.checks,
        version: VERSION.into(),
        seed: out.numeric.seed.unwrap_or(0),
    };
    Ok((report, out.tables))
}

/// Loads, validates and runs a config file, writing `report.json`,
/// `report.meta.json` and the CSV tables into the output directory.
/// Returns the report and the output directory.
pub fn run_file(path: &Path, ov: &Overrides) -> Result<(Report, PathBuf), CliError> {
    let started = Instant::now();
    let base = path.parent().unwrap_or(Path::new("."));
    let cfg = RunConfig::from_path(path)?.validate(ov, base)?;
    let (report, tables) = execute(&cfg)?;
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_json(&dir.join("report.json"), &report)?;
    for t in &tables {
        t.write(&dir)?;
    }
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "unix_time": stamp,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "config_path": path.display().to_string(),
        "output": dir.display().to_string(),
        "tables": tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
    });
    write_json(&dir.join("report.meta.json"), &meta)?;
    Ok((report, dir))
}
