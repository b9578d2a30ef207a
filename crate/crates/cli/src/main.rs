//! qwlab: command-line laboratory for the dynamically noisy quantum walk.
//!
//! Subcommands: `simulate` (one run, noiseless or ensemble), `dcurve`
//! (diffusion constant against noise width), `profile` (averaged profile and
//! its shape classification) and `validate` (cross-check suite).
//!
//! Exit codes: 0 success, 1 validation/assertion failure, 2 usage error.

mod commands;
mod config;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{Method, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, out-of-domain parameters.
    Usage(String),
    /// Everything else (I/O and friends).
    Runtime(anyhow::Error),
}

impl From<qwlab_core::Error> for CliError {
    fn from(err: qwlab_core::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

#[derive(Parser)]
#[command(
    name = "qwlab",
    version,
    about = "Quantum walk with a randomly redrawn coin phase: simulation, analytics and cross-validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one walk and write distribution.csv + moments.csv (noiseless
    /// when --epsilon is omitted, sample-averaged otherwise)
    Simulate(CommonArgs),
    /// Diffusion constant over a grid of noise widths; writes dcurve.csv
    Dcurve(DcurveArgs),
    /// Sample-averaged profile at fixed time with shape classification;
    /// writes profile.csv, fit.json and profile.svg
    Profile(CommonArgs),
    /// Run the cross-validation suite and write report.json
    Validate(ValidateArgs),
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    /// Center of the phase interval, radians
    #[arg(long)]
    g0: Option<f64>,
    /// Half-width of the phase interval, radians, in (0, pi]; omit for a
    /// noiseless run where that is meaningful
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of time steps
    #[arg(long)]
    steps: Option<u64>,
    /// Number of Monte Carlo trajectories
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed; every output is a pure function of the config including
    /// this value
    #[arg(long)]
    seed: Option<u64>,
    /// Initial coin state as four reals re,im,re,im (normalized before use)
    #[arg(long, value_name = "RE,IM,RE,IM", allow_hyphen_values = true)]
    coin: Option<String>,
    /// JSON config file; flags given on the command line override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Momentum-grid size for k integrals
    #[arg(long = "k-grid", value_name = "N")]
    k_grid: Option<usize>,
    /// Gauss-Legendre node count for phase averages
    #[arg(long = "g-nodes", value_name = "N")]
    g_nodes: Option<usize>,
}

#[derive(Args, Clone, Debug)]
struct DcurveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// How to compute D: closed (g0 must be 0 or pi), quadrature, montecarlo
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Smallest half-width in the sweep
    #[arg(long, value_name = "EPS")]
    eps_min: Option<f64>,
    /// Largest half-width in the sweep
    #[arg(long, value_name = "EPS")]
    eps_max: Option<f64>,
    /// Number of grid points
    #[arg(long, value_name = "N")]
    eps_points: Option<usize>,
}

#[derive(Args, Clone, Debug)]
struct ValidateArgs {
    /// quick: structural and dual-route checks (seconds);
    /// full: adds the Monte Carlo triangle and profile shapes (minutes)
    #[arg(value_enum, default_value = "quick")]
    mode: ValidateMode,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ValidateMode {
    Quick,
    Full,
}

impl CommonArgs {
    fn as_config(&self) -> Result<RunConfig, CliError> {
        let coin = match &self.coin {
            None => None,
            Some(text) => {
                let parts: Vec<f64> = text
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Usage(format!("--coin expects re,im,re,im: {e}")))?;
                if parts.len() != 4 {
                    return Err(CliError::Usage(format!(
                        "--coin expects exactly 4 comma-separated reals, got {}",
                        parts.len()
                    )));
                }
                Some([parts[0], parts[1], parts[2], parts[3]])
            }
        };
        Ok(RunConfig {
            g0: self.g0,
            epsilon: self.epsilon,
            steps: self.steps,
            samples: self.samples,
            seed: self.seed,
            coin,
            method: None,
            out: self.out.clone(),
            k_grid: self.k_grid,
            g_nodes: self.g_nodes,
            eps_min: None,
            eps_max: None,
            eps_points: None,
        })
    }

    /// defaults < file < flags.
    fn resolve(&self, defaults: RunConfig) -> Result<RunConfig, CliError> {
        let mut merged = defaults;
        if let Some(path) = &self.config {
            merged = merged.overlaid(&RunConfig::load(path)?);
        }
        Ok(merged.overlaid(&self.as_config()?))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Dcurve(args) => commands::dcurve::run(&args),
        Command::Profile(args) => commands::profile::run(&args),
        Command::Validate(args) => commands::validate::run(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
