use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ncyclo_cli::commands::{self, Outcome, DEFAULT_TOL};
use ncyclo_cli::config::{Format, RunConfig};

/// Charged particle in a constant magnetic field on n-dimensional flat space.
#[derive(Debug, Parser)]
#[command(name = "ncyclo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format. Only `simulate` accepts `csv`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical block decomposition of the field tensor.
    Decompose(Common),
    /// Integrate the equations of motion and report orbit invariants.
    Simulate(Common),
    /// Cyclotron frequencies, spectrum classification and low Landau levels.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of levels to list.
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Commutator tables of the kinetic and dual momenta.
    Verify(Common),
}

enum Failure {
    Config(anyhow::Error),
    Check(Vec<String>),
}

fn tolerance() -> Result<f64> {
    match std::env::var("NCYCLO_TOL") {
        Ok(s) => {
            let v: f64 = s.trim().parse().with_context(|| format!("NCYCLO_TOL={s:?} is not a number"))?;
            anyhow::ensure!(v.is_finite() && v > 0.0, "NCYCLO_TOL must be positive, got {v}");
            Ok(v)
        }
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, which) = match &cli.command {
        Command::Decompose(c) => (c, "decompose"),
        Command::Simulate(c) => (c, "simulate"),
        Command::Spectrum { common, .. } => (common, "spectrum"),
        Command::Verify(c) => (c, "verify"),
    };
    let config = RunConfig::load(&common.config).map_err(Failure::Config)?;
    let from_file = config.output.as_ref().and_then(|o| o.format);
    let format = common.format.or(from_file).unwrap_or(Format::Structured);
    let out_path = common
        .out
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.path.clone()));

    let outcome: Outcome = match &cli.command {
        Command::Simulate(_) => {
            let tol = tolerance().map_err(Failure::Config)?;
            commands::simulate_cmd(&config, format, tol)
        }
        other => {
            commands::require_structured(format, which).map_err(Failure::Config)?;
            match other {
                Command::Decompose(_) => commands::decompose_cmd(&config),
                Command::Spectrum { levels, .. } => commands::spectrum_cmd(&config, *levels),
                _ => commands::verify_cmd(&config),
            }
        }
    }
    .map_err(Failure::Config)?;

    for note in &outcome.notes {
        eprintln!("{}", note.trim_end());
    }
    write_to(out_path.as_deref(), &outcome.document).map_err(Failure::Config)?;
    if let Some(report) = &outcome.report {
        // keep stdout clean when the CSV itself went there
        if out_path.is_some() {
            write_to(None, report).map_err(Failure::Config)?;
        } else {
            eprint!("{report}");
        }
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(outcome.failures))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(names)) => {
            for name in names {
                eprintln!("invariant violated: {name}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
