//! `isocrit`: expected counts and height distributions of critical points of
//! isotropic Gaussian fields, with cross-checks and simulation studies.

mod commands;
mod grid;
mod output;
mod settings;

use clap::{Parser, Subcommand};
use settings::{CliError, Settings};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "isocrit", version, about = "Critical points of isotropic Gaussian random fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ordered-eigenvalue density of GOI(c) along `λ = x + offsets`.
    Density(Settings),
    /// Expected numbers of critical points by index, in total or above thresholds.
    Expect(Settings),
    /// Height densities h_i(x) and exceedance functions F_i(u).
    Heights(Settings),
    /// Cross-path agreement suite (exit 4 on failure).
    Validate(Settings),
    /// Simulate fields and count their critical points.
    Simulate(Settings),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, settings) = match cli.command {
        Command::Density(s) => ("density", s),
        Command::Expect(s) => ("expect", s),
        Command::Heights(s) => ("heights", s),
        Command::Validate(s) => ("validate", s),
        Command::Simulate(s) => ("simulate", s),
    };
    let s = settings.resolve(name)?;
    match name {
        "density" => commands::density(&s),
        "expect" => commands::expect(&s),
        "heights" => commands::heights(&s),
        "validate" => commands::validate(&s),
        _ => commands::simulate(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
