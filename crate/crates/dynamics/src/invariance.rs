//! Empirical check that an ensemble keeps its law under the flow.

use field_core::stats::{bootstrap_se, mean_se};
use field_core::{LatticeField, PhaseState, RngStream};

use crate::ensemble::evolve_ensemble;
use crate::integrator::Integrator;
use crate::{DynamicsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// Spatial mean of :u^2: = sum |u^(n)|^2 - sigma.
    WickSquare { sigma: f64 },
    /// ||pi_k u||^2_{L^2}.
    LowModeNorm(usize),
    /// ||pi_k v||^2_{L^2} of the velocity.
    VelocityLowModeNorm(usize),
    /// Re u^(n).
    ReMode([i32; 3]),
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::WickSquare { .. } => "wick_square_mean".into(),
            Observable::LowModeNorm(k) => format!("low_mode_norm_{k}"),
            Observable::VelocityLowModeNorm(k) => format!("velocity_low_mode_norm_{k}"),
            Observable::ReMode(n) => format!("re_mode_{}_{}_{}", n[0], n[1], n[2]),
        }
    }

    pub fn eval(&self, s: &PhaseState) -> f64 {
        let low = |f: &LatticeField, k: usize| f.project(k).mean_square();
        match self {
            Observable::WickSquare { sigma } => s.pos.mean_square() - sigma,
            Observable::LowModeNorm(k) => low(&s.pos, *k),
            Observable::VelocityLowModeNorm(k) => low(&s.vel, *k),
            Observable::ReMode(n) => s.pos.get(*n).re,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub name: String,
    pub mean_initial: f64,
    pub se_initial: f64,
    pub mean_final: f64,
    pub se_final: f64,
    /// mean_final - mean_initial
    pub diff: f64,
    /// bootstrap standard error of the paired difference of means
    pub diff_se: f64,
    /// two-sided normal p-value of diff / diff_se
    pub p_value: f64,
}

impl ObservableReport {
    /// |diff| within `k` bootstrap standard errors.
    pub fn within(&self, k: f64) -> bool {
        self.diff.abs() <= k * self.diff_se
    }
}

fn two_sided_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Evolves `initial` to `t_final` (member k driven by `stream.fork(k)`) and
/// compares each observable's ensemble mean at both times.
pub fn invariance_experiment(
    integ: &Integrator,
    initial: &[PhaseState],
    t_final: f64,
    observables: &[Observable],
    stream: &RngStream,
) -> Result<Vec<ObservableReport>> {
    if initial.len() < 2 {
        return Err(DynamicsError::InvalidSetup("ensemble needs at least two members".into()));
    }
    let steps = (t_final / integ.scheme().dt).round() as u64;
    let streams: Vec<RngStream> = (0..initial.len() as u64).map(|k| stream.fork(k)).collect();
    let mut states = initial.to_vec();
    evolve_ensemble(integ, &mut states, &streams, 0, steps)?;
    let mut boot = stream.fork(u64::MAX);
    Ok(observables
        .iter()
        .map(|o| {
            let a: Vec<f64> = initial.iter().map(|s| o.eval(s)).collect();
            let b: Vec<f64> = states.iter().map(|s| o.eval(s)).collect();
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y - x).collect();
            let (m0, s0) = mean_se(&a);
            let (m1, s1) = mean_se(&b);
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            let diff = m1 - m0;
            let diff_se = bootstrap_se(&d, 1000, &mut boot, mean);
            ObservableReport {
                name: o.name(),
                mean_initial: m0,
                se_initial: s0,
                mean_final: m1,
                se_final: s1,
                diff,
                diff_se,
                p_value: two_sided_p(diff / diff_se),
            }
        })
        .collect())
}
