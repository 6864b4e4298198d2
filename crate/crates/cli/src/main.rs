//! `deqjump`: tables of the transient, steady-state and moment laws of the
//! catastrophe-repair random walk and its diffusion limit, plus Monte Carlo
//! estimates and the lattice-versus-diffusion comparison.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 i/o error.
//! Failures print one JSON record on stderr.

mod commands;
mod config;
mod error;
mod grid;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Kind;
use config::{Format, Settings};
use error::CliError;
use table::Precision;

#[derive(Parser)]
#[command(
    name = "deqjump",
    version,
    about = "Double-ended queue with catastrophes and repairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transient law P_n(t) or density f(x,t) on a time grid
    Transient(RunArgs),
    /// Limiting law
    Steady(RunArgs),
    /// Mean and variance over a time grid
    Moments(RunArgs),
    /// Monte Carlo estimates with standard errors
    Simulate(RunArgs),
    /// Scaled lattice law against the diffusion limit, one row per (epsilon, n)
    Compare(RunArgs),
    /// The comparison as a wide table rounded to 5 decimals
    Table1(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file (JSON if the name ends in .json); flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match cli.command {
        Command::Transient(a) => (Kind::Transient, a),
        Command::Steady(a) => (Kind::Steady, a),
        Command::Moments(a) => (Kind::Moments, a),
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Compare(a) => (Kind::Compare, a),
        Command::Table1(a) => (Kind::Table1, a),
    };
    let settings = match &args.config {
        Some(path) => args.settings.or(Settings::load(path)?),
        None => args.settings,
    };
    let format = settings.format.unwrap_or(Format::Csv);
    let precision = match (settings.full_precision.unwrap_or(false), kind) {
        (true, _) => Precision::Full,
        (false, Kind::Table1) => Precision::Decimals(5),
        (false, _) => Precision::Significant(6),
    };
    let out = settings.out.clone();
    let table = commands::run(kind, settings)?;

    let sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => table.write_csv(&mut sink, precision)?,
        Format::Json => table.write_json(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err =
                CliError::Validation(e.to_string().lines().next().unwrap_or_default().to_string());
            eprintln!("{}", err.record());
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
