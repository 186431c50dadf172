//! `esf`: command-line front end for elliptic scaling functions.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use esf_core::Error;

use crate::config::JobArgs;
use crate::output::{emit, json_text};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("matrix is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("{0}")]
    MaskPole(String),
    #[error("property checks failed: {0}")]
    Failed(String),
    #[error("{0}")]
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSquare { .. }
            | Error::Empty
            | Error::Singular
            | Error::NotExpanding
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            Error::NotIsotropic(r) => CliError::NotIsotropic(r),
            Error::MaskPoleAtDigit { .. } => CliError::MaskPole(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 0 pass, 1 property failure, 2 config error, 3 non-isotropic, 4 mask pole.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Core(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::NotIsotropic(_) => 3,
            CliError::MaskPole(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "esf", version, about = "Elliptic scaling functions from isotropic dilation matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Isotropy certificate, quadratic form, orthogonal part and digit sets
    Analyze(JobArgs),
    /// Mask, its m-th power and the refinement coefficients
    Mask(JobArgs),
    /// Supremum of mu, Riesz verdict, decay exponent; CSV of mu and phi_hat
    Spectrum(JobArgs),
    /// Lattice values of phi^m at level J as CSV
    Eval(JobArgs),
    /// Run the property checks; exit code 1 if any fails
    Verify {
        #[command(flatten)]
        job: JobArgs,
        /// Include per-check runtimes in the JSON
        #[arg(long)]
        timings: bool,
    },
    /// All stages; writes every artifact to --out
    Report {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long)]
        timings: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = args.resolve()?;
            let (out, problem) = commands::analyze(&cfg)?;
            emit(cfg.out.as_deref(), "analyze.json", &json_text(&out))?;
            problem.map_or(Ok(()), Err)
        }
        Command::Mask(args) => {
            let cfg = args.resolve()?;
            let (out, text) = commands::mask(&cfg)?;
            emit(cfg.out.as_deref(), "mask.json", &json_text(&out))?;
            match cfg.out.as_deref() {
                Some(dir) => output::write_atomic(dir, "mask.txt", &text),
                None => {
                    eprint!("{text}");
                    Ok(())
                }
            }
        }
        Command::Spectrum(args) => {
            let cfg = args.resolve()?;
            let (out, csv) = commands::spectrum(&cfg)?;
            emit(cfg.out.as_deref(), "spectrum.json", &json_text(&out))?;
            if let Some(dir) = cfg.out.as_deref() {
                output::write_atomic(dir, "spectrum.csv", &csv)?;
            }
            Ok(())
        }
        Command::Eval(args) => {
            let cfg = args.resolve()?;
            let csv = commands::eval(&cfg)?;
            emit(cfg.out.as_deref(), "phi.csv", &csv)
        }
        Command::Verify { job, timings } => {
            let cfg = job.resolve()?;
            let rep = commands::verify(&cfg)?;
            commands::summarize(&rep);
            emit(cfg.out.as_deref(), "report.json", &json_text(&rep.to_json(timings)))?;
            commands::report_outcome(&rep)
        }
        Command::Report { job, timings } => {
            let cfg = job.resolve()?;
            let (artifacts, rep) = commands::report(&cfg, timings)?;
            commands::summarize(&rep);
            match cfg.out.as_deref() {
                Some(dir) => {
                    for (name, contents) in &artifacts {
                        output::write_atomic(dir, name, contents)?;
                    }
                }
                None => {
                    // everything except the bulky CSVs, as one JSON document
                    let mut all = serde_json::Map::new();
                    for (name, contents) in &artifacts {
                        if let Some(stem) = name.strip_suffix(".json") {
                            let v: serde_json::Value = serde_json::from_str(contents)
                                .map_err(|e| CliError::Io(e.to_string()))?;
                            all.insert(stem.to_string(), v);
                        }
                    }
                    emit(None, "report.json", &json_text(&serde_json::Value::Object(all)))?;
                }
            }
            commands::report_outcome(&rep)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("esf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
