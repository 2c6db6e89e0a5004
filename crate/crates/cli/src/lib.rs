//! Command-line driver for `gamow-core`.
//!
//! Each subcommand reads a [`config::RunConfig`], computes one
//! [`table::Table`] and writes it as CSV or JSON. When an output path is
//! given, run metadata goes to a `<out>.meta.json` sidecar so the data file
//! itself depends only on the configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::path::{Path, PathBuf};

use clap::Subcommand;

use crate::commands::Outcome;
use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Locate resonance zeros of the delta-shell Jost function.
    Poles,
    /// Zero, complex, Lorentzian and Berggren averages per pole and observable.
    Average,
    /// Lorentzian minus Berggren average across a width grid.
    CompareGamma,
    /// Non-decay amplitude and probability on a time grid.
    Survival,
    /// Boundary-integral recovery of Hardy-class test functions.
    Titchmarsh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Poles => "poles",
            Command::Average => "average",
            Command::CompareGamma => "compare-gamma",
            Command::Survival => "survival",
            Command::Titchmarsh => "titchmarsh",
        }
    }

    pub fn run(self, config: &RunConfig) -> Result<Outcome, CliError> {
        match self {
            Command::Poles => commands::poles(config),
            Command::Average => commands::average(config),
            Command::CompareGamma => commands::compare_gamma(config),
            Command::Survival => commands::survival(config),
            Command::Titchmarsh => commands::titchmarsh(config),
        }
    }
}

/// Everything a run needs besides the subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub out: Option<PathBuf>,
    /// Overrides `output.format` from the configuration.
    pub format: Option<Format>,
}

/// Path of the metadata sidecar for a data file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Runs one subcommand, writes its table and returns the encoded data.
///
/// A table is written even when the run ends in an empty-result failure; the
/// failure is returned afterwards so the caller can set the exit status.
pub fn execute(command: Command, options: &RunOptions) -> Result<String, CliError> {
    let config = match &options.config {
        Some(path) => RunConfig::load(path, &options.overrides)?,
        None => RunConfig::from_text("", &options.overrides)?,
    };
    let format = options.format.unwrap_or(config.output.format);
    let outcome = command.run(&config)?;
    let data = outcome.table.encode(format)?;

    if let Some(out) = &options.out {
        write_file(out, &data)?;
        let meta = serde_json::json!({
            "command": command.name(),
            "config": options.config.as_ref().map(|p| p.display().to_string()),
            "overrides": options.overrides,
            "format": format.name(),
            "generator": concat!("gamow ", env!("CARGO_PKG_VERSION")),
            "table": outcome.table.table,
            "columns": outcome.table.columns.len(),
            "rows": outcome.table.rows.len(),
            "status": outcome.failure.as_ref().map_or("ok".to_string(), |e| e.to_string()),
        });
        let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        text.push('\n');
        write_file(&sidecar_path(out), &text)?;
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(data),
    }
}
