//! Preconditioned Crank-Nicolson Metropolis chain for rho_N.

use std::sync::Arc;

use field_core::stats::integrated_autocorr_time;
use field_core::{sample_gaussian, Lattice, LatticeField, RngStream};

use crate::potential::Potential;
use crate::{GibbsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub pcn_beta: f64,
    pub burn_in: usize,
    pub thinning: usize,
    /// Total number of iterations, burn-in included.
    pub chain_len: usize,
    /// Tune beta towards `target_acceptance` during burn-in (frozen afterwards).
    pub adapt: bool,
    pub target_acceptance: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { pcn_beta: 0.2, burn_in: 1000, thinning: 10, chain_len: 11000, adapt: true, target_acceptance: 0.25 }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pcn_beta > 0.0 && self.pcn_beta <= 1.0) {
            return Err(GibbsError::InvalidConfig(format!("pcn_beta = {} not in (0, 1]", self.pcn_beta)));
        }
        if self.chain_len <= self.burn_in {
            return Err(GibbsError::InvalidConfig(format!(
                "chain_len = {} must exceed burn_in = {}",
                self.chain_len, self.burn_in
            )));
        }
        if self.thinning == 0 {
            return Err(GibbsError::InvalidConfig("thinning must be >= 1".into()));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(GibbsError::InvalidConfig("target_acceptance must be in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    /// Post-burn-in states, every `thinning`-th iteration.
    pub samples: Vec<LatticeField>,
    /// Acceptance rate after burn-in.
    pub acceptance: f64,
    /// Step size used after burn-in.
    pub beta: f64,
    /// Spatial mean of :u^2: at every post-burn-in iteration.
    pub trace: Vec<f64>,
    /// Integrated autocorrelation time of `trace`, in iterations.
    pub iat: f64,
}

impl ChainResult {
    /// Mean of the trace with a standard error inflated by the autocorrelation time.
    pub fn trace_mean(&self) -> (f64, f64) {
        let (m, se) = field_core::stats::mean_se(&self.trace);
        (m, se * self.iat.sqrt())
    }
}

/// Runs one pCN chain started at `init` (a draw of mu when `None`).
/// Iteration k uses `rng.fork(k)`.
pub fn pcn_sample(
    pot: &Potential,
    lat: &Arc<Lattice>,
    cfg: &ChainConfig,
    init: Option<LatticeField>,
    rng: &RngStream,
) -> Result<ChainResult> {
    cfg.validate()?;
    let shift = match pot {
        Potential::Wick(t) => t.sigma_n,
        _ => 0.0,
    };
    let mut u = match init {
        Some(f) => f.transfer(lat),
        None => sample_gaussian(lat, &mut rng.fork(u64::MAX)),
    };
    let mut fu = pot.eval(&u)?;
    let mut log_beta = cfg.pcn_beta.ln();
    let mut accepted = 0usize;
    let mut samples = Vec::new();
    let mut trace = Vec::with_capacity(cfg.chain_len - cfg.burn_in);
    for k in 0..cfg.chain_len {
        let beta = log_beta.exp();
        let mut r = rng.fork(k as u64);
        let xi = sample_gaussian(lat, &mut r);
        let mut v = u.scaled((1.0 - beta * beta).sqrt());
        v.axpy(beta, &xi)?;
        let fv = pot.eval(&v)?;
        let accept = r.uniform().ln() < fu - fv;
        if accept {
            u = v;
            fu = fv;
        }
        if k < cfg.burn_in {
            if cfg.adapt {
                let gain = 1.0 / (1.0 + k as f64).powf(0.6);
                let hit = if accept { 1.0 } else { 0.0 };
                log_beta = (log_beta + gain * (hit - cfg.target_acceptance)).clamp(-12.0, 0.0);
            }
            continue;
        }
        accepted += accept as usize;
        trace.push(u.mean_square() - shift);
        if (k - cfg.burn_in) % cfg.thinning == 0 {
            samples.push(u.clone());
        }
    }
    let iat = integrated_autocorr_time(&trace);
    Ok(ChainResult {
        samples,
        acceptance: accepted as f64 / (cfg.chain_len - cfg.burn_in) as f64,
        beta: log_beta.exp(),
        trace,
        iat,
    })
}
