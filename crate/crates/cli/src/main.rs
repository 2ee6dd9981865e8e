//! `nmrc`: drives the nanomagnet reservoir from TOML experiment configs.
//!
//! Exit codes: 0 success, 1 artifact IO failure, 2 configuration error,
//! 3 simulation failure (divergence, unconverged relaxation, failed drive
//! calibration).

mod artifacts;
mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad config file or flag value.
    Config(String),
    /// An error surfaced by the simulation library; setup problems keep the
    /// config exit code, dynamics failures get their own.
    Core(nmrc_core::Error),
    /// Failed to write an artifact.
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError::Io(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                nmrc_core::Error::Diverged { .. }
                | nmrc_core::Error::CalibrationFailed { .. } => 3,
                nmrc_core::Error::Io(_) => 1,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<nmrc_core::Error> for CliError {
    fn from(e: nmrc_core::Error) -> CliError {
        CliError::Core(e)
    }
}

#[derive(Parser)]
#[command(name = "nmrc", version, about = "Frustrated nanomagnet reservoir simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file and write its artifacts.
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Artifact directory; overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Relax an array from a seeded near-uniform state and report the
    /// frustrated pattern it lands in.
    Relax {
        /// Layout file; omitted means the canonical 5 x 7 grid.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Artifact directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Named parameter set.
        #[arg(long, default_value = "coupled-pma")]
        set: String,
    },
    /// Grid-search drive and ridge parameters; one CSV row per grid point.
    Sweep {
        /// Experiment config with a [sweep] section.
        #[arg(long)]
        config: PathBuf,
        /// Artifact directory; overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compare platform cost metrics and write the ratio table.
    Efficiency {
        /// Config with an [efficiency] section; omitted uses the built-in
        /// reference numbers.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Artifact directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed } => commands::cmd_run(&config, out.as_deref(), seed),
        Command::Relax { layout, out, seed, set } => {
            commands::cmd_relax(layout.as_deref(), &out, seed, &set)
        }
        Command::Sweep { config, out, seed, threads } => {
            commands::cmd_sweep(&config, out.as_deref(), seed, threads)
        }
        Command::Efficiency { config, out } => commands::cmd_efficiency(config.as_deref(), &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
