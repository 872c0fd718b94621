mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::Settings;

/// Interior transmission eigenvalues of radially stratified balls.
#[derive(Parser)]
#[command(name = "stratum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check Assumption A; prints the report as JSON.
    Validate(Settings),
    /// Eigenvalues per angular index, as CSV.
    Eigs(Settings),
    /// Localization ratios along an eigen-sequence, as CSV plus a JSON summary.
    Localize(Settings),
    /// Radial samples of one eigenpair, as CSV.
    Profile(Settings),
    /// Scan the two-layer benchmark medium for the eigenvalue nearest k² = 402.989.
    #[command(name = "reproduce-fig1")]
    ReproduceFig1(Settings),
}

pub enum Failure {
    /// Bad input: exit code 1.
    Config(anyhow::Error),
    /// A computation failed: exit code 2.
    Numerical {
        error: anyhow::Error,
        m: Option<u32>,
        k: Option<f64>,
    },
}

impl Failure {
    pub fn from_lib(e: stratum::Error) -> Failure {
        use stratum::Error as E;
        match e {
            E::Domain { .. }
            | E::OrderTooLarge(_)
            | E::InvalidMedium(_)
            | E::Parse { .. }
            | E::AtInterface(_)
            | E::WrongProfileKind { .. }
            | E::AssumptionA(_)
            | E::Degenerate
            | E::OutsideGrid(..) => Failure::Config(e.into()),
            E::NoSignChange { m, .. } => Failure::Numerical {
                error: e.into(),
                m: Some(m),
                k: None,
            },
            E::StepUnderflow { m, k, .. } => Failure::Numerical {
                error: e.into(),
                m: Some(m),
                k: Some(k),
            },
            E::DegenerateNormalization(k) => Failure::Numerical {
                error: e.into(),
                m: None,
                k: Some(k),
            },
            _ => Failure::Numerical {
                error: e.into(),
                m: None,
                k: None,
            },
        }
    }

    /// Attaches the failing `(m, k)` where the error does not carry it.
    pub fn at(self, m_at: u32, k_at: Option<f64>) -> Failure {
        match self {
            Failure::Numerical { error, m, k } => Failure::Numerical {
                error,
                m: m.or(Some(m_at)),
                k: k.or(k_at),
            },
            other => other,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, flags) = match cli.command {
        Command::Validate(s) => ("validate", s),
        Command::Eigs(s) => ("eigs", s),
        Command::Localize(s) => ("localize", s),
        Command::Profile(s) => ("profile", s),
        Command::ReproduceFig1(s) => ("reproduce-fig1", s),
    };
    let s = Settings::resolve(flags).map_err(Failure::Config)?;
    if let Some(jobs) = s.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Config(e.into()))?;
    }
    match name {
        "validate" => commands::validate(&s),
        "eigs" => commands::eigs(&s),
        "localize" => commands::localize(&s),
        "profile" => commands::profile(&s),
        _ => commands::reproduce_benchmark(&s),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("{}", json!({"error": "config", "message": format!("{e:#}")}));
            ExitCode::from(1)
        }
        Err(Failure::Numerical { error, m, k }) => {
            eprintln!("{}", json!({"error": "numerical", "message": format!("{error:#}"), "m": m, "k": k}));
            ExitCode::from(2)
        }
    }
}
