//! Coefficients of the averaged and rescaled potentials of an even polynomial
//! V(z) = sum_j a_j z^{2j}, and a coupled comparison of the macroscopic
//! equation with its cubic reference.
//!
//! Notation: beta = 3/2 - alpha, sigma the continuum variance 4 pi / (3 - 2 alpha),
//! sigma_N = sum_{|n| <= N} <n>^{-2 alpha} and s~_N = N^{-2 beta} sigma_N.

use thiserror::Error;

pub mod coupled;
pub mod potential;
pub mod renorm;

pub use coupled::{coupled_convergence_experiment, CoupledConfig, CoupledReport};
pub use potential::{
    averaged_coeffs, check_criticality_positivity, continuum_sigma, gauss_hermite, MicroPotential, ShapeReport,
};
pub use renorm::{hermite_potential_vn, kappa_fit, kappa_fit_with, renorm_coeffs_n, KappaFit, RenormCoeffs, VnCoeffs};

#[derive(Debug, Error)]
pub enum UniversalityError {
    #[error("continuum variance diverges for alpha = {0} (need alpha < 3/2)")]
    Divergent(f64),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("potential is not critical (abar_1 = {0})")]
    NotCritical(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Field(#[from] field_core::FieldError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
}

pub type Result<T> = std::result::Result<T, UniversalityError>;
