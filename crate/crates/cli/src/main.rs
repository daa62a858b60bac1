#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;
mod io;

use config::{Overrides, RunConfig};

/// Exponential Orlicz norms, chaos bounds and Monte Carlo tail checks.
///
/// Exit status: 0 on success, 1 for a negative mathematical outcome (an
/// infinite norm or a failed verdict), 2 for a usage or configuration error.
#[derive(Debug, Parser)]
#[command(name = "psinorm", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for the report and CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (0 uses every core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Scalar norms of a distribution or a sample file.
    Norm,
    /// The vector norm chain of a random vector.
    Vecnorm,
    /// Monte Carlo check of a chaos tail bound.
    ChaosVerify,
    /// Compares the tau norm of a weighted sum with its coordinates.
    RotationCheck,
    /// Calibrates the universal constant C.
    CalibrateC,
    /// Lists the built-in distributions.
    ZooList,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration (exit 2).
    Usage(String),
    /// A meaningful negative result (exit 1).
    Negative(String),
}

impl From<psinorm::error::Error> for CliError {
    fn from(e: psinorm::error::Error) -> Self {
        match e {
            psinorm::error::Error::Calibration(_) => CliError::Negative(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// What a command produced.
pub struct Outcome {
    pub report: serde_json::Value,
    /// Extra files written next to `report.json`.
    pub files: Vec<(String, String)>,
    pub success: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut c = RunConfig::load(path)?;
            if let Some(dir) = path.parent() {
                c.rebase_paths(dir);
            }
            c
        }
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        tol: cli.tol,
        out: cli.out.clone(),
        samples: cli.samples,
        workers: cli.workers,
    });
    cfg.validate()?;
    let workers = cfg.workers.unwrap_or(0);
    psinorm::rng::with_workers(workers, move || match cli.command {
        Command::Norm => commands::norm(cfg),
        Command::Vecnorm => commands::vecnorm(cfg),
        Command::ChaosVerify => commands::chaos_verify(cfg),
        Command::RotationCheck => commands::rotation_check(cfg),
        Command::CalibrateC => commands::calibrate(cfg),
        Command::ZooList => commands::zoo_list(cfg),
    })
}

fn write_outputs(out: &std::path::Path, outcome: &Outcome, report: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("report.json"), report)?;
    for (name, content) in &outcome.files {
        std::fs::write(out.join(name), content)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let report = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
            let out = outcome
                .report
                .get("config")
                .and_then(|c| c.get("out"))
                .and_then(|o| o.as_str())
                .map(PathBuf::from);
            if let Some(dir) = out {
                if let Err(e) = write_outputs(&dir, &outcome, &report) {
                    eprintln!("error: cannot write outputs to {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
            // A closed pipe on stdout is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{report}");
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
