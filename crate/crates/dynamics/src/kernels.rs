//! Mode-wise linear flow and the exact covariance of its stochastic forcing.
//!
//! For one Fourier mode, u'' + u' + lambda u = sqrt(2) dB/dt with
//! lambda = <n>^{2 alpha} and omega = sqrt(lambda - 1/4). With
//! D(t) = e^{-t/2} sin(omega t) / omega the homogeneous flow is
//!
//! ```text
//! u(t) = D'(t) u0 + D(t) (u0 + v0)
//! v(t) = -lambda D(t) u0 + D'(t) v0
//! ```
//!
//! and the stochastic convolution over a step h has covariance
//! 2 int_0^h (D^2, D D', D'^2)(s) ds per unit of E|dB|^2 / dt.

use std::collections::HashMap;
use std::sync::Arc;

use field_core::lattice::norm2;
use field_core::{Complex64, Lattice, PhaseState, RngStream};

/// Closed-form 2x2 propagator [[a, b], [c, d]] over time h.
pub fn propagator(lambda: f64, h: f64) -> [f64; 4] {
    let w = (lambda - 0.25).sqrt();
    let e = (-0.5 * h).exp();
    let (s, c) = (w * h).sin_cos();
    let dd = e * s / w;
    let ddp = e * (c - s / (2.0 * w));
    [ddp + dd, dd, -lambda * dd, ddp]
}

/// (Sigma_uu, Sigma_uv, Sigma_vv) of sqrt(2) int_0^h (D, D')(h - s) dB(s).
pub fn noise_covariance(lambda: f64, h: f64) -> [f64; 3] {
    let w = (lambda - 0.25).sqrt();
    let e = (-h).exp();
    let (s2, c2) = (2.0 * w * h).sin_cos();
    let den = 1.0 + 4.0 * w * w;
    // int_0^h e^{-s}, e^{-s} cos(2ws), e^{-s} sin(2ws)
    let i0 = -(-h).exp_m1();
    let ic = (1.0 - e * (c2 - 2.0 * w * s2)) / den;
    let is = (2.0 * w - e * (s2 + 2.0 * w * c2)) / den;
    // 1 - cos(2ws) integrated, computed without cancellation for small h
    let one_minus_cos = i0 - ic;
    let uu = one_minus_cos / (2.0 * w * w);
    let uv = is / (2.0 * w) - one_minus_cos / (4.0 * w * w);
    let vv = 0.5 * (i0 + ic) - is / (2.0 * w) + one_minus_cos / (8.0 * w * w);
    [2.0 * uu, 2.0 * uv, 2.0 * vv]
}

/// Cholesky factor (l11, l21, l22) of a 2x2 PSD matrix (xx, xy, yy).
fn cholesky2(c: [f64; 3]) -> [f64; 3] {
    let l11 = c[0].max(0.0).sqrt();
    if l11 == 0.0 {
        return [0.0, 0.0, c[2].max(0.0).sqrt()];
    }
    let l21 = c[1] / l11;
    let l22 = (c[2] - l21 * l21).max(0.0).sqrt();
    [l11, l21, l22]
}

/// Propagators and noise factors over one step, one entry per distinct |n|^2.
#[derive(Debug, Clone)]
pub struct ModeKernels {
    lat: Arc<Lattice>,
    dt: f64,
    slot: Vec<usize>,
    prop: Vec<[f64; 4]>,
    cov: Vec<[f64; 3]>,
    chol: Vec<[f64; 3]>,
}

impl ModeKernels {
    pub fn new(lat: &Arc<Lattice>, dt: f64) -> Self {
        let mut by_r2: HashMap<i64, usize> = HashMap::new();
        let mut slot = Vec::with_capacity(lat.len());
        let mut prop = Vec::new();
        let mut cov = Vec::new();
        let mut chol = Vec::new();
        for &m in lat.modes() {
            let r2 = norm2(m);
            let k = *by_r2.entry(r2).or_insert_with(|| {
                let lambda = (1.0 + r2 as f64).powf(lat.alpha());
                prop.push(propagator(lambda, dt));
                let c = noise_covariance(lambda, dt);
                cov.push(c);
                chol.push(cholesky2(c));
                prop.len() - 1
            });
            slot.push(k);
        }
        Self { lat: Arc::clone(lat), dt, slot, prop, cov, chol }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    /// Propagator entries [a, b, c, d] for the mode stored at index i.
    pub fn propagator_at(&self, i: usize) -> [f64; 4] {
        self.prop[self.slot[i]]
    }

    /// Noise covariance (uu, uv, vv) for the mode stored at index i, in units
    /// of E|.|^2 of the complex coefficient.
    pub fn covariance_at(&self, i: usize) -> [f64; 3] {
        self.cov[self.slot[i]]
    }

    pub fn distinct(&self) -> usize {
        self.prop.len()
    }

    /// Applies the homogeneous flow in place.
    pub fn propagate(&self, s: &mut PhaseState) {
        let PhaseState { pos, vel } = s;
        let (pu, pv) = (pos.coeffs_mut(), vel.coeffs_mut());
        for i in 0..pu.len() {
            let [a, b, c, d] = self.prop[self.slot[i]];
            let (x, y) = (pu[i], pv[i]);
            pu[i] = a * x + b * y;
            pv[i] = c * x + d * y;
        }
    }

    /// Adds one exact stochastic-convolution increment drawn from `rng`.
    pub fn add_noise(&self, s: &mut PhaseState, rng: &mut RngStream) {
        let lat = &self.lat;
        let PhaseState { pos, vel } = s;
        let (pu, pv) = (pos.coeffs_mut(), vel.coeffs_mut());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..lat.len() {
            let [l11, l21, l22] = self.chol[self.slot[i]];
            let (z1, z2) = if i == 0 {
                (Complex64::new(rng.normal(), 0.0), Complex64::new(rng.normal(), 0.0))
            } else if lat.is_representative(i) {
                (
                    Complex64::new(h * rng.normal(), h * rng.normal()),
                    Complex64::new(h * rng.normal(), h * rng.normal()),
                )
            } else {
                continue;
            };
            let du = l11 * z1;
            let dv = l21 * z1 + l22 * z2;
            pu[i] += du;
            pv[i] += dv;
            let j = lat.conj_index(i);
            if j != i {
                pu[j] += du.conj();
                pv[j] += dv.conj();
            }
        }
    }

    /// Same law as `add_noise`, with mode n drawing from `rng.fork(mode_key(n))`
    /// so that nested truncations share their common noise.
    pub fn add_noise_keyed(&self, s: &mut PhaseState, rng: &RngStream) {
        let lat = &self.lat;
        let PhaseState { pos, vel } = s;
        let (pu, pv) = (pos.coeffs_mut(), vel.coeffs_mut());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..lat.len() {
            let [l11, l21, l22] = self.chol[self.slot[i]];
            let mut r = rng.fork(field_core::mode_key(lat.mode(i)));
            let (z1, z2) = if i == 0 {
                (Complex64::new(r.normal(), 0.0), Complex64::new(r.normal(), 0.0))
            } else if lat.is_representative(i) {
                (Complex64::new(h * r.normal(), h * r.normal()), Complex64::new(h * r.normal(), h * r.normal()))
            } else {
                continue;
            };
            let du = l11 * z1;
            let dv = l21 * z1 + l22 * z2;
            pu[i] += du;
            pv[i] += dv;
            let j = lat.conj_index(i);
            if j != i {
                pu[j] += du.conj();
                pv[j] += dv.conj();
            }
        }
    }

    /// Euler-Maruyama noise: velocity kick sqrt(2 dt) times white noise.
    pub fn add_euler_noise(&self, s: &mut PhaseState, rng: &mut RngStream) {
        let w = field_core::sample_white(&self.lat, rng);
        s.vel.axpy((2.0 * self.dt).sqrt(), &w).expect("same lattice");
    }
}

/// Exact homogeneous flow over time dt.
pub fn linear_propagate(state: &PhaseState, dt: f64) -> PhaseState {
    let k = ModeKernels::new(state.lattice(), dt);
    let mut s = state.clone();
    k.propagate(&mut s);
    s
}

/// One exact stochastic-convolution increment over dt, as a phase-state
/// increment (position part, velocity part).
pub fn noise_increment(lat: &Arc<Lattice>, dt: f64, rng: &mut RngStream) -> PhaseState {
    let k = ModeKernels::new(lat, dt);
    let mut s = PhaseState::zeros(lat);
    k.add_noise(&mut s, rng);
    s
}
