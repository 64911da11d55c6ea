//! `asep`: batch driver for the exact formulas, oracles and simulations.

mod commands;
mod config;
mod error;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "asep", version, about = "Exact formulas and simulation for ASEP with step initial data")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "ASEP_THREADS")]
    threads: Option<usize>,
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Simulate the current: moments and distribution of N_0(t).
    Simulate(RunConfig),
    /// Current distribution from the exact finite-window chain.
    Oracle(RunConfig),
    /// Transition probability of k-particle ASEP.
    Green(RunConfig),
    /// Moments E[tau^{k N_0(t)}].
    Moments(RunConfig),
    /// Distribution P(N_0(t) = m).
    Dist(RunConfig),
    /// tau-Laplace transform of tau^{N_0(t)}.
    Laplace(RunConfig),
    /// Delta Bose gas moment.
    Bose(RunConfig),
    /// GUE Tracy-Widom distribution function.
    Gue(RunConfig),
    /// Rescaled current against F_GUE.
    Compare(RunConfig),
    /// Cross-route agreement suite.
    Validate(RunConfig),
    /// Re-run the command named in `--config`, with optional overrides.
    Run(RunConfig),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("asep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (command, flags) = match cli.command {
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::Oracle(f) => (Command::Oracle, f),
        Sub::Green(f) => (Command::Green, f),
        Sub::Moments(f) => (Command::Moments, f),
        Sub::Dist(f) => (Command::Dist, f),
        Sub::Laplace(f) => (Command::Laplace, f),
        Sub::Bose(f) => (Command::Bose, f),
        Sub::Gue(f) => (Command::Gue, f),
        Sub::Compare(f) => (Command::Compare, f),
        Sub::Validate(f) => (Command::Validate, f),
        Sub::Run(f) => {
            let command = file
                .command
                .ok_or_else(|| CliError::Usage("`run` needs a --config that names its command".into()))?;
            (command, f)
        }
    };
    let resolved = file.overridden_by(&flags).resolve(command)?;
    commands::run(&resolved)
}
