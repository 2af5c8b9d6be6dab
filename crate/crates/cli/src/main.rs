//! `jacobi-scatter`: validate profiles, tabulate scattering data and run the
//! identity checks from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! unusable input.

mod commands;
mod config;
mod emit;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(&cli.options)?;
    let outcome = match cli.command {
        Command::Validate => commands::validate(&cfg)?,
        Command::Scatter => commands::scatter(&cfg)?,
        Command::Factorize => commands::factorize(&cfg)?,
        Command::ClosedForm => commands::closed_form(&cfg)?,
        Command::Verify => commands::verify(&cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.data)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(outcome.data.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    eprintln!("{}", outcome.summary);
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
