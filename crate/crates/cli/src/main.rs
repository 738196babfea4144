mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::{Method, Overrides, RunConfig};
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Thermal-photon decoherence of slow charged particles.
#[derive(Parser)]
#[command(name = "thermal-decoherence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quadrature tolerance (absolute, per unit αv²)
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,
    /// Reduced validation subset
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate S over a grid of points
    Sweep,
    /// Interference exponent and visibility, optionally a screen pattern
    Visibility,
    /// Wigner transform of a Gaussian slice with momentum damping
    Wigner,
    /// Run the oracle suite and write validate.json
    Validate,
    /// Print the resolved coefficients and pinned constants
    Constants,
}

const THREADS_VAR: &str = "THERMAL_DECOHERENCE_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("THERMAL_DECOHERENCE_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(CliError::Config("THERMAL_DECOHERENCE_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let overrides = Overrides {
        out: cli.out,
        seed: cli.seed,
        tol: cli.tol,
        method: cli.method,
        quick: cli.quick,
    };
    let load = || RunConfig::load(cli.config.as_deref(), &overrides);
    match cli.command {
        Command::Sweep => commands::sweep(&load()?),
        Command::Visibility => commands::visibility(&load()?),
        Command::Wigner => commands::wigner(&load()?),
        Command::Validate => commands::validate(&load()?),
        Command::Constants => commands::constants(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
