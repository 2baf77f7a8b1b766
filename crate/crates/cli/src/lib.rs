//! Command-line front end: reads a scenario file, runs one analysis and
//! prints record tables as CSV or JSON lines.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand};
use config::{parse_grid, ScenarioConfig, SweepParameter};
pub use error::CliError;
use output::{render, Format};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "polariton", version, about = "Many-polariton scattering by lossy objects")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides `run.tolerance` (unitarity).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check unitarity and kernel identities of every sector matrix.
    Validate,
    /// Sector probabilities by the kernel and amplitude routes.
    Scatter {
        /// Also print the outgoing amplitudes.
        #[arg(long)]
        tensors: bool,
    },
    /// Reduced density matrix of the scattered radiation and its spectrum.
    Reduce {
        /// Add the brute-force partial trace as a cross-check.
        #[arg(long)]
        oracle: bool,
    },
    /// Closed-form analysis of a single-polariton input.
    OnePhoton,
    /// Closed-form analysis of a two-polariton input.
    TwoPhoton,
    /// Repeat the reduction over a grid of loss or eta_e values.
    Sweep {
        #[arg(long, value_enum)]
        parameter: Option<SweepParameter>,
        /// `a,b,c` or `start:stop:steps`.
        #[arg(long)]
        grid: Option<String>,
    },
}

/// Printed output and exit status of a successful run.
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Parse("--config is required".into()))?;
    let cfg = ScenarioConfig::load(path)?;
    let run = || run_command(cli, &cfg);
    let report = match cli.threads {
        Some(0) => return Err(CliError::Parse("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Resource(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(Outcome { text: render(&report.tables, cli.format), status: report.status })
}

fn run_command(cli: &Cli, cfg: &ScenarioConfig) -> Result<commands::Report, CliError> {
    let settings = cfg.settings(cli.seed, cli.tolerance);
    match &cli.command {
        Command::Validate => commands::validate(cfg, &settings),
        Command::Scatter { tensors } => commands::scatter(cfg, &settings, *tensors),
        Command::Reduce { oracle } => commands::reduce(cfg, &settings, *oracle),
        Command::OnePhoton => commands::one_photon(cfg, &settings),
        Command::TwoPhoton => commands::two_photon(cfg, &settings),
        Command::Sweep { parameter, grid } => {
            let grid = grid.as_deref().map(parse_grid).transpose()?;
            commands::sweep(cfg, &settings, *parameter, grid)
        }
    }
}
