//! Command-line front end: argument parsing, run configuration, commands
//! and output writing. `main.rs` only maps the result to an exit code.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ratdyn::scan::{Objective, SlicePolicy};
use thiserror::Error;

pub use config::{Format, RunConfig};

/// Environment variable capping the worker threads used by scans.
pub const THREADS_ENV: &str = "RATDYN_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Degenerate(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ratdyn", version, about = "Dynamics of z[n+1] = (a + z[n-1]) / (b z[n] + z[n-1]) over C")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Main iteration count: max_iters for orbit/basin/period harness,
    /// steps for lyapunov/tables/chaos harness, evaluations for scan
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    #[arg(long, global = true)]
    pub eps_singular: Option<f64>,
    #[arg(long, global = true)]
    pub radius_unbounded: Option<f64>,
    #[arg(long, global = true)]
    pub eps_converge: Option<f64>,
    #[arg(long, global = true)]
    pub converge_window: Option<usize>,
    #[arg(long, global = true)]
    pub max_period: Option<usize>,
    #[arg(long, global = true)]
    pub eps_cycle: Option<f64>,
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    #[arg(long, global = true)]
    pub transient_discard: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Harness {
    /// Periods >= 3 over random parameters and initial values
    Period,
    /// Chaos vs |b| < |1 + 4a| over random parameters
    Chaos,
    /// Chaos vs |b| < |1 + 4a| over the published chaotic rows
    Rows,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, linearizations, margins and the |b| vs |1 + 4a| check
    Analyze,
    /// Iterate from the configured initial pair
    Orbit,
    /// Period-two cycle, its stability and a dynamic check
    Period2,
    /// Largest Lyapunov exponent
    Lyapunov {
        /// Also write the running-average series as CSV
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Seeded extremum search for a stability expression
    Scan {
        #[arg(long, value_parser = parse_objective)]
        objective: Option<Objective>,
    },
    /// Outcome raster over a slice of initial conditions
    Basin {
        #[arg(long, value_parser = parse_slice)]
        slice: Option<SlicePolicy>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Evidence harnesses for the period and chaos conjectures
    Conjectures {
        #[arg(long, value_enum, default_value = "period")]
        harness: Harness,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Regenerate the reference tables next to recomputed values
    Tables,
}

fn parse_snake<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    parse_snake(s)
}

fn parse_slice(s: &str) -> Result<SlicePolicy, String> {
    parse_snake(s)
}

/// Builds the process-wide thread pool from `RATDYN_THREADS`, if set.
pub fn init_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_ENV}: {e}")))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    commands::dispatch(&cli.command, &cli.common, &cfg)
}
