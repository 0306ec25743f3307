//! Command-line pipeline: `synth`, `ingest`, `features`, `lagscan`,
//! `backtest` and `report`. Every command writes under
//! `<out>/run-<config hash>/` and prints that directory.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hlc_core::{ErrorKind, QuarterIndex};

pub use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "hlc", version, about = "House prices and household lending capacity")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root; runs go to `<out>/run-<hash>`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for `synth`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Last training quarter of the truncated fits, e.g. 2008Q2.
    #[arg(long, global = true, value_parser = config::parse_cutoff)]
    pub cutoff: Option<QuarterIndex>,
    /// Inclusive lag range for `lagscan`, e.g. 0..12.
    #[arg(long, global = true, value_parser = config::parse_lag_range)]
    pub lags: Option<(i64, i64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset and a config that ingests it.
    Synth,
    /// Read the `[data]` series, normalize units and write an aligned frame.
    Ingest,
    /// Build model features from a frame CSV.
    Features { frame: PathBuf },
    /// R² of the response on each lag of the candidate.
    Lagscan { features: PathBuf },
    /// Fit the model grid on full and truncated samples and score it.
    Backtest { features: PathBuf },
    /// Render a report JSON as per-specification tables.
    Report { report: PathBuf },
}

impl Cli {
    /// Loads the config file (or defaults) and applies flag overrides.
    pub fn effective_config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        if let Some(seed) = self.seed {
            if matches!(self.command, Command::Synth) {
                cfg.synth.seed = seed;
            } else {
                log::warn!("--seed only applies to synth; ignored");
            }
        }
        if let Some(cutoff) = self.cutoff {
            cfg.split.cutoff = cutoff;
        }
        if let Some((min, max)) = self.lags {
            cfg.lagscan.min_lag = min;
            cfg.lagscan.max_lag = max;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the command, writing human-readable output to `out`. Returns the run
/// directory.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<PathBuf> {
    let cfg = cli.effective_config()?;
    let run_dir = cfg.run_dir();
    match &cli.command {
        Command::Synth => commands::synth(&cfg, &run_dir, out)?,
        Command::Ingest => commands::ingest(&cfg, &run_dir, out)?,
        Command::Features { frame } => commands::features(&cfg, frame, &run_dir, out)?,
        Command::Lagscan { features } => commands::lagscan(&cfg, features, &run_dir, out)?,
        Command::Backtest { features } => commands::backtest(&cfg, features, &run_dir, out)?,
        Command::Report { report } => commands::report(report, &run_dir, out)?,
    }
    writeln!(out, "run directory: {}", run_dir.display())?;
    Ok(run_dir)
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Exit status for an error: 2 configuration, 3 data, 4 numerical, 1 other.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return EXIT_CONFIG;
        }
        if cause.is::<commands::AllVariantsFailed>() {
            return EXIT_NUMERICAL;
        }
        if let Some(e) = cause.downcast_ref::<hlc_core::Error>() {
            return match e.kind() {
                ErrorKind::Config => EXIT_CONFIG,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
                ErrorKind::Io => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}
