//! `tcurv`: batch driver for the curvature identity checks.

mod config;
mod render;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Format};
use run::{CliError, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    match execute(&cli) {
        Ok(outcome) => ExitCode::from(if outcome.pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TCURV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("TCURV_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let outcome = run::dispatch(&cli.command)?;
    let body = match cli.command.format() {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Text => render::text(&outcome.report),
    };
    match cli.command.out() {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Internal(e.to_string()))?,
    }
    Ok(outcome)
}
