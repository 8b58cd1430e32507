//! Stochastic objects of the truncated cubic equation, all built from one
//! noise realization.
//!
//! `<1>` is the stationary stochastic convolution (initial data drawn from the
//! Gaussian phase-space measure), `<2>` and `<3>` its Wick powers, and
//! `<30> = pi_N I(<3>)`, `<320> = pi_N I(<30> <2>)`, `<70> = pi_N I(<30>^2 <1>)`
//! with I the Duhamel operator of the damped wave equation
//! w'' + w' + (1 - Lap)^alpha w = F, w(0) = w'(0) = 0.
//!
//! Every random draw is keyed by frequency, so the same realization seen at
//! two truncations agrees on the common modes.

use std::sync::Arc;

use dynamics::{DynamicsError, ModeKernels};
use field_core::{pointwise_map2, sample_keyed, Complex64, FieldError, Lattice, LatticeField, PhaseState, RngStream};
use thiserror::Error;
use wick::{wick_power, WickError, WickTable};

pub mod convergence;
pub mod decay;
pub mod remainder;

pub use convergence::{convergence_rate, ConvergenceReport};
pub use decay::{fit_decay_exponent, fit_spectrum, fit_spectrum_above, shell_spectrum, DecayFit, Shell};
pub use remainder::{evolve_with_path, remainder_experiment, second_order_remainder, RemainderReport, Trajectory};

#[derive(Debug, Error)]
pub enum StochError {
    #[error("too few shells for a decay fit: {0}")]
    TooFewShells(usize),
    #[error("objects and trajectory come from different noise realizations")]
    NoiseMismatch,
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

pub type Result<T> = std::result::Result<T, StochError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Lin,
    Quad,
    Cub,
    CubInt,
    QuintInt,
    SeptInt,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 6] =
        [ObjectKind::Lin, ObjectKind::Quad, ObjectKind::Cub, ObjectKind::CubInt, ObjectKind::QuintInt, ObjectKind::SeptInt];

    pub fn tag(self) -> &'static str {
        match self {
            ObjectKind::Lin => "<1>",
            ObjectKind::Quad => "<2>",
            ObjectKind::Cub => "<3>",
            ObjectKind::CubInt => "<30>",
            ObjectKind::QuintInt => "<320>",
            ObjectKind::SeptInt => "<70>",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Lin => "lin",
            ObjectKind::Quad => "quad",
            ObjectKind::Cub => "cub",
            ObjectKind::CubInt => "cub_int",
            ObjectKind::QuintInt => "quint_int",
            ObjectKind::SeptInt => "sept_int",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s || k.tag() == s)
    }

    /// Wiener chaos order.
    pub fn order(self) -> usize {
        match self {
            ObjectKind::Lin => 1,
            ObjectKind::Quad => 2,
            ObjectKind::Cub | ObjectKind::CubInt => 3,
            ObjectKind::QuintInt => 5,
            ObjectKind::SeptInt => 7,
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, ObjectKind::CubInt | ObjectKind::QuintInt | ObjectKind::SeptInt)
    }

    /// Expected spatial regularity s* (the object is in H^{s*-eps}).
    pub fn regularity(self, alpha: f64) -> f64 {
        match self {
            ObjectKind::Lin => alpha - 1.5,
            ObjectKind::Quad => 2.0 * alpha - 3.0,
            ObjectKind::Cub => 3.0 * alpha - 4.5,
            ObjectKind::CubInt => 3.0 * alpha - 3.0,
            ObjectKind::QuintInt | ObjectKind::SeptInt => alpha - 0.5,
        }
    }

    /// Spectral slope of E|f^(n)|^2 matching the regularity: -3 - 2 s*.
    pub fn predicted_slope(self, alpha: f64) -> f64 {
        -3.0 - 2.0 * self.regularity(alpha)
    }
}

/// One noise realization on the uniform grid t_k = k t_final / steps.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub stream: RngStream,
    pub t_final: f64,
    pub steps: usize,
}

impl NoisePath {
    pub fn new(stream: RngStream, t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_final > 0.0) {
            return Err(StochError::InvalidSetup(format!("steps = {steps}, t_final = {t_final}")));
        }
        Ok(Self { stream, t_final, steps })
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn id(&self) -> (u64, u64) {
        (self.stream.master_seed(), self.stream.stream_id())
    }

    /// Initial data drawn from mu x mu_0.
    pub fn initial(&self, lat: &Arc<Lattice>) -> PhaseState {
        let pos = sample_keyed(lat, &self.stream.fork(0), |i| lat.weight(i));
        let vel = sample_keyed(lat, &self.stream.fork(1), |_| 1.0);
        PhaseState { pos, vel }
    }

    /// Exact stochastic-convolution increment of step k (from t_k to t_{k+1}).
    pub fn increment(&self, kernels: &ModeKernels, k: usize) -> PhaseState {
        let mut s = PhaseState::zeros(kernels.lattice());
        kernels.add_noise_keyed(&mut s, &self.stream.fork(2 + k as u64));
        s
    }
}

/// Values of an object at t_k, k = 0..=steps.
#[derive(Debug, Clone)]
pub struct ObjectPath {
    pub kind: ObjectKind,
    pub dt: f64,
    pub noise: (u64, u64),
    pub values: Vec<LatticeField>,
}

impl ObjectPath {
    pub fn last(&self) -> &LatticeField {
        self.values.last().expect("non-empty path")
    }
}

/// <1> on the grid of the path.
pub fn linear_path(lat: &Arc<Lattice>, path: &NoisePath) -> Vec<LatticeField> {
    let kernels = ModeKernels::new(lat, path.dt());
    let mut s = path.initial(lat);
    let mut out = Vec::with_capacity(path.steps + 1);
    out.push(s.pos.clone());
    for k in 0..path.steps {
        kernels.propagate(&mut s);
        let xi = path.increment(&kernels, k);
        s.pos.axpy(1.0, &xi.pos).expect("same lattice");
        s.vel.axpy(1.0, &xi.vel).expect("same lattice");
        out.push(s.pos.clone());
    }
    out
}

/// I(F) at t_k for forcing sampled at t_k, by the composite trapezoid rule in
/// the forcing time: S_{k+1} = P(h) S_k + h/2 [P(h)(0, F_k) + (0, F_{k+1})].
pub fn duhamel(forcing: &[LatticeField], dt: f64) -> Result<Vec<LatticeField>> {
    let lat = Arc::clone(forcing.first().ok_or_else(|| StochError::InvalidSetup("empty forcing".into()))?.lattice());
    let kernels = ModeKernels::new(&lat, dt);
    let len = lat.len();
    let mut w = vec![Complex64::new(0.0, 0.0); len];
    let mut wp = vec![Complex64::new(0.0, 0.0); len];
    let mut out = Vec::with_capacity(forcing.len());
    out.push(LatticeField::zeros(&lat));
    for k in 0..forcing.len() - 1 {
        let (f0, f1) = (forcing[k].coeffs(), forcing[k + 1].coeffs());
        for i in 0..len {
            let [a, b, c, d] = kernels.propagator_at(i);
            let (x, y) = (w[i], wp[i] + 0.5 * dt * f0[i]);
            w[i] = a * x + b * y;
            wp[i] = c * x + d * y + 0.5 * dt * f1[i];
        }
        out.push(LatticeField::from_coeffs(&lat, w.clone())?);
    }
    Ok(out)
}

/// Builds the requested objects from one realization; `<1>` and the
/// intermediate objects are shared.
pub fn build_objects(kinds: &[ObjectKind], table: &WickTable, path: &NoisePath) -> Result<Vec<ObjectPath>> {
    let lat = Arc::new(Lattice::new(table.alpha, table.trunc_n)?);
    let sigma = table.sigma_n;
    let dt = path.dt();
    let needs = |k: ObjectKind| kinds.contains(&k);
    let lin = linear_path(&lat, path);
    let need_cub_int = needs(ObjectKind::CubInt) || needs(ObjectKind::QuintInt) || needs(ObjectKind::SeptInt);
    let quad = if needs(ObjectKind::Quad) {
        Some(lin.iter().map(|f| wick_power(f, 2, sigma)).collect::<std::result::Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let cub = if needs(ObjectKind::Cub) || need_cub_int {
        Some(lin.iter().map(|f| wick_power(f, 3, sigma)).collect::<std::result::Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let cub_int = if need_cub_int { Some(duhamel(cub.as_ref().unwrap(), dt)?) } else { None };
    let product = |map: &dyn Fn(f64, f64) -> f64| -> Result<Vec<LatticeField>> {
        let ci = cub_int.as_ref().expect("built above");
        let forcing = ci
            .iter()
            .zip(&lin)
            .map(|(z, y)| pointwise_map2(z, y, 3, &lat, map))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        duhamel(&forcing, dt)
    };
    let mut out = Vec::new();
    for &k in kinds {
        let values = match k {
            ObjectKind::Lin => lin.clone(),
            ObjectKind::Quad => quad.clone().unwrap(),
            ObjectKind::Cub => cub.clone().unwrap(),
            ObjectKind::CubInt => cub_int.clone().unwrap(),
            ObjectKind::QuintInt => product(&|z, y| z * (y * y - sigma))?,
            ObjectKind::SeptInt => product(&|z, y| z * z * y)?,
        };
        out.push(ObjectPath { kind: k, dt, noise: path.id(), values });
    }
    Ok(out)
}

/// Single-object convenience wrapper.
pub fn build_object(kind: ObjectKind, table: &WickTable, path: &NoisePath) -> Result<ObjectPath> {
    Ok(build_objects(&[kind], table, path)?.remove(0))
}
