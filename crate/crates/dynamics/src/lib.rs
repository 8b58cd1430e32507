//! Truncated stochastic damped fractional wave dynamics
//!
//! ```text
//! u'' + u' + (1 - Lap)^alpha u + pi_N F(pi_N u) = sqrt(2) xi
//! ```
//!
//! integrated by splitting: the linear part and its stochastic convolution are
//! solved exactly mode by mode, the force enters as a velocity kick.

use std::sync::Arc;

use field_core::{FieldError, Lattice, RngStream};
use thiserror::Error;
use wick::WickTable;

pub mod ensemble;
pub mod force;
pub mod integrator;
pub mod invariance;
pub mod kernels;

pub use ensemble::evolve_ensemble;
pub use force::HermiteForce;
pub use integrator::{Integrator, NoiseMode, Splitting, StepScheme};
pub use invariance::{invariance_experiment, Observable, ObservableReport};
pub use field_core::PhaseState;
pub use kernels::{linear_propagate, noise_increment, propagator, noise_covariance, ModeKernels};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },
    #[error("invalid step scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid experiment setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Wick(#[from] wick::WickError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

fn one_step(state: &PhaseState, scheme: StepScheme, force: HermiteForce, rng: &mut RngStream) -> Result<PhaseState> {
    let integ = Integrator::new(state.lattice(), scheme, Some(force))?;
    let mut s = state.clone();
    integ.step_with(&mut s, rng)?;
    Ok(s)
}

/// One step of the truncated cubic model with force pi_N :(pi_N u)^3:.
pub fn step_truncated_cubic(
    state: &PhaseState,
    table: &WickTable,
    scheme: StepScheme,
    rng: &mut RngStream,
) -> Result<PhaseState> {
    one_step(state, scheme, HermiteForce::cubic(table.sigma_n, 1.0), rng)
}

/// One step of the macroscopic model with force pi_N V_N'(pi_N u), V_N given by
/// its Hermite coefficients c_j of H_{2j}(.; sigma_N).
pub fn step_macroscopic(
    state: &PhaseState,
    sigma_n: f64,
    vn_coeffs: &[f64],
    scheme: StepScheme,
    rng: &mut RngStream,
) -> Result<PhaseState> {
    one_step(state, scheme, HermiteForce::from_potential(sigma_n, vn_coeffs), rng)
}

/// One step of the cubic reference model with mass term:
/// force kappa pi_N u + 4 abar2 pi_N :(pi_N u)^3:.
pub fn step_reference_dagger(
    state: &PhaseState,
    table: &WickTable,
    kappa: f64,
    a2bar: f64,
    scheme: StepScheme,
    rng: &mut RngStream,
) -> Result<PhaseState> {
    one_step(state, scheme, HermiteForce::reference(table.sigma_n, kappa, a2bar), rng)
}

/// Lattice able to carry a force of the given degree.
pub fn lattice_for(alpha: f64, n: usize, degree: usize) -> Result<Arc<Lattice>> {
    Ok(Arc::new(Lattice::for_degree(alpha, n, degree)?))
}
