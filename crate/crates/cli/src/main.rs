//! `qsampler`: config-driven experiment runner.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical contract violation.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "qsampler", version, about = "Floquet quantum samplers: propagators, frame potentials and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one propagator and write it with its eigenphases.
    Propagator(Common),
    /// Estimate k-frame potentials of a sampler.
    FramePotential(Common),
    /// Random-matrix diagnostics of one propagator.
    Diagnostics(Common),
    /// Stroboscopic section of the classical Hamiltonian.
    Poincare(Common),
    /// Print the built-in samplers.
    ListSamplers(Common),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, env = "QSAMPLER_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn configure_workers(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Other(e.into()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Propagator(c)
        | Command::FramePotential(c)
        | Command::Diagnostics(c)
        | Command::Poincare(c)
        | Command::ListSamplers(c) => c.clone(),
    };
    configure_workers(common.workers)?;
    match cli.command {
        Command::Propagator(c) => commands::propagator(&c),
        Command::FramePotential(c) => commands::frame_potential(&c),
        Command::Diagnostics(c) => commands::diagnostics(&c),
        Command::Poincare(c) => commands::poincare(&c),
        Command::ListSamplers(c) => commands::list_samplers(&c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsampler: {e}");
            e.exit_code()
        }
    }
}
