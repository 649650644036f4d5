//! Experiment driver for small-ball refraction design: configuration,
//! orchestration of the solvers and CSV/JSON output.

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("realizability failure: {0}")]
    Realizability(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Realizability(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<refract_core::Error> for CliError {
    fn from(e: refract_core::Error) -> Self {
        use refract_core::Error as E;
        let msg = e.to_string();
        match e {
            E::SolverFailure { .. } | E::SingularSystem { .. } => CliError::Solver(msg),
            E::Realizability(_) | E::PackingInfeasible { .. } => CliError::Realizability(msg),
            E::InvalidArgument(_) | E::GridMismatch | E::CoincidentPoints => CliError::Config(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "refract",
    version,
    about = "Design and verify small-ball refraction media"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Placement seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Split a target refraction coefficient into density and ball coefficient.
    Design,
    /// Solve for the effective field and its Helmholtz residual.
    Effective,
    /// Compare many-ball fields with the effective field as the radius shrinks.
    Converge,
    /// Check the near-diagonal behavior of the background Green's function.
    ProbeGreens,
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    Ok(config)
}

/// Runs one command and returns the line to print on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if cli.threads > 0 {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let config = resolve_config(cli)?;
    let out = config.output_dir();
    match cli.command {
        Command::Design => commands::cmd_design(&config, &out),
        Command::Effective => commands::cmd_effective(&config, &out),
        Command::Converge => {
            let (rows, verdict) = commands::cmd_converge(&config, &out)?;
            let mut s = String::new();
            for r in &rows {
                match r.error {
                    Some(e) => s.push_str(&format!(
                        "a = {:<10} M = {:<7} e = {e:.6e}\n",
                        r.radius, r.balls
                    )),
                    None => s.push_str(&format!(
                        "a = {:<10} M = {:<7} {}\n",
                        r.radius, r.balls, r.status
                    )),
                }
            }
            s.push_str(&format!(
                "strictly decreasing: {}",
                verdict.strictly_decreasing
            ));
            Ok(s)
        }
        Command::ProbeGreens => commands::cmd_probe_greens(&config, &out),
    }
}
