//! The truncated Gibbs measure d rho_N = Z_N^{-1} e^{-R_N} d mu.
//!
//! Samplers (pCN, importance sampling from a fitted Gaussian), the
//! Boue-Dupuis variational upper bound on -log Z_N, the change of drift
//! variables that exposes alpha_N, and the singularity statistic B_N R_N.

use field_core::FieldError;
use thiserror::Error;
use wick::WickError;

pub mod change_of_variables;
pub mod gaussian_fit;
pub mod importance;
pub mod pcn;
pub mod potential;
pub mod singularity;
pub mod variational;

pub use change_of_variables::{drift_change_of_variables, identity_sides, sample_y_path, zdot, IdentitySides, YPath};
pub use gaussian_fit::{fit_gaussian, GaussianFit};
pub use importance::{estimate_logz_importance, ImportanceEstimate, Proposal};
pub use pcn::{pcn_sample, ChainConfig, ChainResult};
pub use potential::Potential;
pub use singularity::{a_n, b_n, rn_variance_exact, singularity_statistic, Ensemble, SingularityStat};
pub use variational::{boue_dupuis_minimize, objective_gradient, shells, BdConfig, BdResult, Control, DriftPath};

#[derive(Debug, Error)]
pub enum GibbsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("all importance weights underflowed ({0})")]
    WeightUnderflow(String),
    #[error("variational objective diverged at iteration {iteration}: {value}")]
    Divergent { iteration: usize, value: f64 },
    #[error("time grid mismatch: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, GibbsError>;
