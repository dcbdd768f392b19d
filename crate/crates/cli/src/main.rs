//! `axiograd` — attribute model outputs to inputs, audit attribution
//! methods against the axiom suite, and run convergence studies.
//!
//! Exit codes are part of the interface so CI can assert behaviors:
//! 0 success, 1 configuration error, 2 the attribution is undefined on the
//! requested path (nondifferentiable), 3 a selected axiom check failed.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AttributeArgs, AxiomsArgs, ConvergeArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files, or model/endpoint combinations — exit 1.
    Config(String),
    /// The attribution does not exist on the requested path — exit 2.
    Undefined(String),
}

impl From<axiograd::Error> for CliError {
    fn from(err: axiograd::Error) -> Self {
        match err {
            axiograd::Error::NondifferentiablePath { .. } => CliError::Undefined(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "axiograd",
    version,
    about = "Feature attribution with machine-checkable axioms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one attribution for a model file and an endpoint pair.
    Attribute(AttributeArgs),
    /// Run axiom checks for a method over seeded generated cases.
    Axioms(AxiomsArgs),
    /// Run a convergence study (smoothing or Taylor truncation).
    Converge(ConvergeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Attribute(args) => commands::attribute(args),
        Command::Axioms(args) => commands::axioms(args),
        Command::Converge(args) => commands::converge(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Undefined(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
