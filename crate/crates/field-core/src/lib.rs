//! Spectral fields on the torus (R / 2 pi Z)^3 truncated to the ball |n| <= N.
//!
//! A real field is stored through its Fourier coefficients
//! u(x) = sum_{|n| <= N} u^(n) e^{i n.x} with u^(-n) = conj u^(n).
//! Spatial integrals are taken against the normalized measure dx / (2 pi)^3,
//! so the integral of a field is its zero mode and Parseval reads
//! mean(u^2) = sum |u^(n)|^2.

pub mod checkpoint;
pub mod error;
pub mod fft;
pub mod field;
pub mod lattice;
pub mod nonlinear;
pub mod rng;
pub mod sample;
pub mod stats;

pub use error::{FieldError, Result};
pub use field::{project, sobolev_norm, LatticeField, PhaseState};
pub use lattice::{bracket_symbol, japanese, Lattice};
pub use nonlinear::{dealiased_power, pointwise_map, pointwise_map2, pointwise_map_pair, pointwise_mean, projected_power};
pub use rng::RngStream;
pub use sample::{mode_key, sample_gaussian, sample_gaussian_pair, sample_keyed, sample_white, sample_with_variance};

pub use num_complex::Complex64;
