mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command, FileConfig};
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &file),
        Command::Spectrum(a) => commands::spectrum(a, &file),
        Command::Mixing(a) => commands::mixing(a, &file),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
