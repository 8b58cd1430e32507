//! `fphi`: runs the experiments of every module from a flat configuration and
//! persists a CSV table plus a JSON sidecar per run.

use std::path::Path;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use thiserror::Error;

pub mod config;
pub mod experiments;
pub mod record;

pub use config::{Flags, Params};
pub use record::{ExperimentRecord, Output};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Runtime(_) => "runtime",
            CliError::Checkpoint(_) => "checkpoint",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Checkpoint(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<field_core::FieldError> for CliError {
    fn from(e: field_core::FieldError) -> Self {
        use field_core::FieldError as F;
        match e {
            F::InvalidLattice(_) | F::GridTooSmall { .. } => CliError::Validation(e.to_string()),
            F::CorruptCheckpoint(_) | F::CheckpointMismatch(_) => CliError::Checkpoint(e.to_string()),
            F::Io(io) => CliError::Io(io),
            F::LatticeMismatch => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<wick::WickError> for CliError {
    fn from(e: wick::WickError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<gibbs::GibbsError> for CliError {
    fn from(e: gibbs::GibbsError) -> Self {
        match e {
            gibbs::GibbsError::InvalidConfig(_) | gibbs::GibbsError::GridMismatch(_) => CliError::Validation(e.to_string()),
            gibbs::GibbsError::Field(f) => f.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<dynamics::DynamicsError> for CliError {
    fn from(e: dynamics::DynamicsError) -> Self {
        match e {
            dynamics::DynamicsError::InvalidScheme(_) | dynamics::DynamicsError::InvalidSetup(_) => {
                CliError::Validation(e.to_string())
            }
            dynamics::DynamicsError::Field(f) => f.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<stochobj::StochError> for CliError {
    fn from(e: stochobj::StochError) -> Self {
        match e {
            stochobj::StochError::InvalidSetup(_) => CliError::Validation(e.to_string()),
            stochobj::StochError::Field(f) => f.into(),
            stochobj::StochError::Dynamics(d) => d.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<universality::UniversalityError> for CliError {
    fn from(e: universality::UniversalityError) -> Self {
        use universality::UniversalityError as U;
        match e {
            U::Field(f) => f.into(),
            U::Dynamics(d) => d.into(),
            U::InvalidConfig(_) | U::InvalidPotential(_) | U::NotCritical(_) | U::Divergent(_) => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<counting::CountingError> for CliError {
    fn from(e: counting::CountingError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    WickTable,
    AlphaN,
    SampleGibbs,
    Logz,
    Variational,
    Singularity,
    Evolve,
    Invariance,
    StochobjDecay,
    StochobjConverge,
    UniversalityCoeffs,
    UniversalityConverge,
    CountingVerify,
}

impl Experiment {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "fphi", version, about = "Pseudo-spectral lab for the fractional hyperbolic Phi^4_3 model")]
pub struct Cli {
    pub experiment: Experiment,
    #[command(flatten)]
    pub flags: Flags,
}

/// Runs one experiment and persists its outputs under `--out`.
pub fn run(experiment: Experiment, params: &Params) -> Result<ExperimentRecord, CliError> {
    let start = Instant::now();
    params.seed()?;
    let out = experiments::dispatch(experiment, params)?;
    let dir = params.out_dir()?;
    let record = ExperimentRecord::new(&experiment.name(), params.effective(), start.elapsed().as_secs_f64(), out.results.clone());
    record::persist(Path::new(&dir), &out, record)
}

/// Entry point shared by the binary and the tests; returns the exit code.
/// A leading `run` argument is accepted and ignored.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let mut args = args;
    if args.get(1).map(String::as_str) == Some("run") {
        args.remove(1);
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = Params::resolve(&cli.flags).and_then(|p| run(cli.experiment, &p));
    match result {
        Ok(rec) => {
            for f in &rec.files {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.category(), "message": e.to_string() }));
            e.exit_code()
        }
    }
}
