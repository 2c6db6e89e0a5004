use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gamow_cli::config::Format;
use gamow_cli::error::CliError;
use gamow_cli::{execute, Command, RunOptions};

/// Resonance poles, energy averages, survival curves and boundary-integral
/// checks for a delta-shell scattering model.
#[derive(Debug, Parser)]
#[command(name = "gamow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here (plus a .meta.json sidecar) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Override one configuration value, e.g. --set model.strength=20.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = RunOptions {
        config: cli.config,
        overrides: cli.overrides,
        out: cli.out.clone(),
        format: cli.format,
    };
    let result = execute(cli.command, &options);
    let code = match result {
        Ok(data) => {
            if cli.out.is_none() {
                if let Err(e) = std::io::stdout().write_all(data.as_bytes()) {
                    eprintln!("gamow: {}", CliError::Io(e.to_string()));
                    return ExitCode::from(1);
                }
            }
            0
        }
        Err(e) => {
            eprintln!("gamow: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
