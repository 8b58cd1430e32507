//! Gaussian fields with diagonal covariance in Fourier space.

use std::sync::Arc;

use num_complex::Complex64;

use crate::field::{LatticeField, PhaseState};
use crate::lattice::Lattice;
use crate::rng::RngStream;

/// Centred Gaussian field with E|u^(n)|^2 = var(i) at storage index i.
/// The zero mode is real N(0, var); for each pair {n, -n} the representative
/// gets independent real and imaginary parts N(0, var/2). Draws are taken in
/// storage order.
pub fn sample_with_variance(lat: &Arc<Lattice>, rng: &mut RngStream, var: impl Fn(usize) -> f64) -> LatticeField {
    let mut f = LatticeField::zeros(lat);
    let c = f.coeffs_mut();
    for i in 0..lat.len() {
        if i == 0 {
            c[0] = Complex64::new(var(0).sqrt() * rng.normal(), 0.0);
        } else if lat.is_representative(i) {
            let s = (0.5 * var(i)).sqrt();
            let z = Complex64::new(s * rng.normal(), s * rng.normal());
            c[i] = z;
            c[lat.conj_index(i)] = z.conj();
        }
    }
    f
}

/// Stream tag of a frequency, independent of the truncation.
pub fn mode_key(n: [i32; 3]) -> u64 {
    let f = |c: i32| (c + 1024) as u64;
    (f(n[0]) << 22) | (f(n[1]) << 11) | f(n[2])
}

/// Like `sample_with_variance`, but mode n draws from `rng.fork(mode_key(n))`,
/// so fields sampled on nested lattices agree on their common modes.
pub fn sample_keyed(lat: &Arc<Lattice>, rng: &RngStream, var: impl Fn(usize) -> f64) -> LatticeField {
    let mut f = LatticeField::zeros(lat);
    let c = f.coeffs_mut();
    for i in 0..lat.len() {
        if i == 0 {
            let mut r = rng.fork(mode_key(lat.mode(0)));
            c[0] = Complex64::new(var(0).sqrt() * r.normal(), 0.0);
        } else if lat.is_representative(i) {
            let mut r = rng.fork(mode_key(lat.mode(i)));
            let s = (0.5 * var(i)).sqrt();
            let z = Complex64::new(s * r.normal(), s * r.normal());
            c[i] = z;
            c[lat.conj_index(i)] = z.conj();
        }
    }
    f
}

/// Sample of the base measure mu: E|u^(n)|^2 = <n>^{-2 alpha}.
pub fn sample_gaussian(lat: &Arc<Lattice>, rng: &mut RngStream) -> LatticeField {
    sample_with_variance(lat, rng, |i| lat.weight(i))
}

/// Truncated white noise: E|u^(n)|^2 = 1.
pub fn sample_white(lat: &Arc<Lattice>, rng: &mut RngStream) -> LatticeField {
    sample_with_variance(lat, rng, |_| 1.0)
}

/// (u, v) with u ~ mu and v ~ mu_0 independent.
pub fn sample_gaussian_pair(lat: &Arc<Lattice>, rng: &mut RngStream) -> PhaseState {
    let pos = sample_gaussian(lat, rng);
    let vel = sample_white(lat, rng);
    PhaseState { pos, vel }
}
