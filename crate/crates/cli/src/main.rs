mod commands;
mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Format;
use crate::figures::Figure;

#[derive(Debug, Parser)]
#[command(
    name = "iot-pricing",
    version,
    about = "Equilibrium pricing sweeps for push, pull and hybrid IoT markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibrium rows per model and sweep point, or a figure preset.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        figure: Option<Figure>,
    },
    /// Deviation-oracle check of every equilibrium on the sweep.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Grid points per decision variable.
        #[arg(long, default_value_t = iot_pricing::oracle::DEFAULT_GRID_STEPS)]
        grid: usize,
        /// Relative deviation gain tolerated.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Shift an equilibrium price before checking, e.g. `w:+0.5`.
        #[arg(long, value_name = "VAR:+DELTA")]
        perturb: Option<String>,
    },
    /// Cross-model series, thresholds, orderings and preferred models.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Revenue-maximizing ad price for an advertiser pool.
    OptimalB {
        #[command(flatten)]
        common: Common,
        /// Advertiser pool file (overrides `ad.pool`).
        #[arg(long)]
        pool: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `push`, `pull`, `hybrid` or `all`.
    #[arg(long)]
    pub model: Option<String>,
    /// `ba1:START:STOP:STEP` or `b:START:STOP:STEP`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Push equilibrium selector in [0, 1]; 0 is the CSP's worst point.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
    #[error("output closed")]
    BrokenPipe,
}

impl CliError {
    pub fn config(field: &str, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {e}"))
    }

    pub fn io(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::BrokenPipe
        } else {
            CliError::Io(e.to_string())
        }
    }

    pub fn csv(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Self::io(io),
            other => CliError::Io(format!("{other:?}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::BrokenPipe => 0,
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep { common, figure } => commands::sweep(&common, figure),
        Command::Verify {
            common,
            grid,
            tol,
            perturb,
        } => commands::verify(&common, grid, tol, perturb.as_deref()),
        Command::Compare { common } => commands::compare(&common),
        Command::OptimalB { common, pool } => commands::optimal_b(&common, pool.as_deref()),
    };
    match result {
        Ok(()) | Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iot-pricing: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
