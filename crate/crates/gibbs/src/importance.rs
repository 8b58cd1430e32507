//! Importance sampling of Z_N = E_mu[e^{-F}].

use std::sync::Arc;

use field_core::{sample_gaussian, Lattice, LatticeField, RngStream};

use crate::gaussian_fit::{fit_gaussian, GaussianFit};
use crate::potential::Potential;
use crate::{GibbsError, Result};

#[derive(Debug, Clone)]
pub enum Proposal {
    /// Draw from mu itself; weights e^{-F}.
    Prior,
    /// Draw from a Gaussian q; weights e^{-F} d mu / d q.
    Fitted(GaussianFit),
}

impl Proposal {
    /// The Gibbs-Bogoliubov optimal Gaussian for this potential.
    pub fn fitted(pot: &Potential, lat: &Arc<Lattice>) -> Self {
        Proposal::Fitted(fit_gaussian(pot, lat))
    }
}

#[derive(Debug, Clone)]
pub struct ImportanceEstimate {
    pub log_z: f64,
    /// Delta-method standard error of log_z.
    pub stderr: f64,
    /// Kish effective sample size.
    pub ess: f64,
    pub log_weights: Vec<f64>,
    /// Observable evaluated on each draw.
    pub observable: Vec<f64>,
}

impl ImportanceEstimate {
    fn normalized(&self) -> Vec<f64> {
        let mx = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter().map(|l| (l - mx).exp()).collect()
    }

    /// Self-normalized estimate of E_rho[observable] with its delta-method error.
    pub fn observable_mean(&self) -> (f64, f64) {
        let w = self.normalized();
        let sw: f64 = w.iter().sum();
        let m = w.iter().zip(&self.observable).map(|(w, f)| w * f).sum::<f64>() / sw;
        let v = w.iter().zip(&self.observable).map(|(w, f)| (w * (f - m)).powi(2)).sum::<f64>() / (sw * sw);
        (m, v.sqrt())
    }
}

/// Importance estimate of log Z with an observable recorded on every draw.
/// Draw i uses `rng.fork(i)`.
pub fn importance_sample(
    pot: &Potential,
    lat: &Arc<Lattice>,
    proposal: &Proposal,
    n_samples: usize,
    rng: &RngStream,
    obs: impl Fn(&LatticeField) -> f64,
) -> Result<ImportanceEstimate> {
    if n_samples < 1000 {
        return Err(GibbsError::InvalidConfig(format!("need at least 1000 samples, got {n_samples}")));
    }
    let mut log_weights = Vec::with_capacity(n_samples);
    let mut observable = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut r = rng.fork(i as u64);
        let (f, ld) = match proposal {
            Proposal::Prior => (sample_gaussian(lat, &mut r), 0.0),
            Proposal::Fitted(q) => {
                let f = q.sample(&mut r);
                let ld = q.log_density_ratio(&f);
                (f, ld)
            }
        };
        log_weights.push(ld - pot.eval(&f)?);
        observable.push(obs(&f));
    }
    let mx = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !mx.is_finite() {
        return Err(GibbsError::WeightUnderflow(format!(
            "largest log weight is {mx}; the proposal misses the bulk of rho_N"
        )));
    }
    let w: Vec<f64> = log_weights.iter().map(|l| (l - mx).exp()).collect();
    let n = n_samples as f64;
    let m = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    let ess = (m * n).powi(2) / w.iter().map(|x| x * x).sum::<f64>();
    Ok(ImportanceEstimate {
        log_z: mx + m.ln(),
        stderr: var.sqrt() / (m * n.sqrt()),
        ess,
        log_weights,
        observable,
    })
}

/// log Z_N for the potential, recording the mean of :u^2: (or of u^2 when the
/// potential carries no Wick table) as the observable.
pub fn estimate_logz_importance(
    pot: &Potential,
    lat: &Arc<Lattice>,
    proposal: &Proposal,
    n_samples: usize,
    rng: &RngStream,
) -> Result<ImportanceEstimate> {
    let shift = match pot {
        Potential::Wick(t) => t.sigma_n,
        _ => 0.0,
    };
    importance_sample(pot, lat, proposal, n_samples, rng, |f| f.mean_square() - shift)
}
