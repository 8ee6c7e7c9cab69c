mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or failed validation (exit 1).
    Input(String),
    /// Two independent computations disagree (exit 2).
    CrossCheck(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::CrossCheck(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "error: {msg}"),
            CliError::CrossCheck(msg) => write!(f, "cross-check failed: {msg}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Modeq(args) => commands::cmd_modeq(&RunConfig::resolve(args, true)?),
        Command::Regions(args) => commands::cmd_regions(&RunConfig::resolve(args, true)?),
        Command::Radius(args) => commands::cmd_radius(&RunConfig::resolve(args, true)?),
        Command::Figures { common, steps, modes } => {
            commands::cmd_figures(&RunConfig::resolve(common, true)?, steps, modes)
        }
        Command::Certify { common, support, horizon, dx } => {
            commands::cmd_certify(&RunConfig::resolve(common, true)?, support, horizon, dx)
        }
        Command::Symmetry(args) => commands::cmd_symmetry(&RunConfig::resolve(args, false)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
