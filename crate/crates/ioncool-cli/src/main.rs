//! Batch runner for the ioncool experiments.
//!
//! Exit codes: 0 success, 2 config error (message names the offending key),
//! 3 numerical failure (truncation overflow, non-convergence), 1 I/O error.

mod config;
mod experiments;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "ioncool", version, about = "Trapped-ion cooling simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file
    Run {
        /// Path to the config (JSON: experiment, parameters, optional output)
        config: PathBuf,
        /// Output directory (overrides the config's `output` field)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List available experiments and their parameter keys
    List,
}

fn run(config_path: &PathBuf, out_override: Option<PathBuf>) -> Result<(), CliError> {
    let started = Instant::now();
    let raw = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config_path.display())))?;
    let echo: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
    let cfg: ConfigFile = serde_json::from_value(echo.clone())
        .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;

    let out_dir = out_override
        .or(cfg.output)
        .unwrap_or_else(|| PathBuf::from("."));
    let writer = experiments::dispatch(&cfg.experiment, &cfg.parameters, &out_dir)?;
    writer.finish(&cfg.experiment, &echo, started.elapsed().as_secs_f64())?;
    Ok(())
}

fn list() {
    println!("{:<16} {}", "experiment", "description");
    println!("{:<16} {}", "----------", "-----------");
    for (name, keys, desc) in experiments::EXPERIMENTS {
        println!("{name:<16} {desc}");
        println!("{:<16}   keys: {keys}", "");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Run { config, out } => match run(&config, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}", e.message());
                ExitCode::from(e.exit_code())
            }
        },
    }
}
