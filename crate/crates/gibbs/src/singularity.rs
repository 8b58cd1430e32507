//! The statistic B_N R_N(u) separating mu from rho_N.
//!
//! A_N = sum_{|n| <= N} <n>^{6 - 8 alpha} and B_N = (log N)^{-1/4} A_N^{-1/2}.

use std::sync::Arc;

use field_core::stats::{mean_se, variance_se};
use field_core::{sample_gaussian, Lattice, RngStream};
use wick::{potential_rn, quartic_contraction_sum, shell_multiplicities, WickTable};

use crate::gaussian_fit::fit_gaussian;
use crate::pcn::{pcn_sample, ChainConfig};
use crate::potential::Potential;
use crate::{GibbsError, Result};

pub fn a_n(alpha: f64, n_cut: usize) -> f64 {
    shell_multiplicities(n_cut)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r2, &c)| c as f64 * (1.0 + r2 as f64).powf(3.0 - 4.0 * alpha))
        .sum()
}

pub fn b_n(alpha: f64, n_cut: usize) -> f64 {
    (n_cut as f64).ln().powf(-0.25) / a_n(alpha, n_cut).sqrt()
}

/// Var_mu(R_N) = 4! / 16 * sum_{n_1 + ... + n_4 = 0} prod <n_j>^{-2 alpha}.
pub fn rn_variance_exact(alpha: f64, n_cut: usize) -> Result<f64> {
    Ok(1.5 * quartic_contraction_sum(alpha, n_cut)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    /// Independent draws of mu.
    Mu { size: usize },
    /// pCN chain for rho_N, warm-started at a draw of the fitted Gaussian.
    Rho { chain: ChainConfig },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityStat {
    pub n: usize,
    pub a_n: f64,
    pub b_n: f64,
    /// B_N R_N(u) over the ensemble.
    pub samples: Vec<f64>,
}

impl SingularityStat {
    pub fn mean(&self) -> (f64, f64) {
        mean_se(&self.samples)
    }

    pub fn variance(&self) -> (f64, f64) {
        variance_se(&self.samples)
    }
}

/// One row per N (N >= 2). The ensemble for cutoff N uses `rng.fork(N)`.
pub fn singularity_statistic(
    alpha: f64,
    n_list: &[usize],
    ensemble: &Ensemble,
    rng: &RngStream,
) -> Result<Vec<SingularityStat>> {
    n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(GibbsError::InvalidConfig(format!("B_N needs N >= 2, got {n}")));
            }
            let lat = Arc::new(Lattice::new(alpha, n)?);
            let table = WickTable::new(alpha, n);
            let (a, b) = (a_n(alpha, n), b_n(alpha, n));
            let r = rng.fork(n as u64);
            let samples = match ensemble {
                Ensemble::Mu { size } => (0..*size)
                    .map(|i| {
                        let f = sample_gaussian(&lat, &mut r.fork(i as u64));
                        Ok(b * potential_rn(&f, &table)?)
                    })
                    .collect::<Result<Vec<_>>>()?,
                Ensemble::Rho { chain } => {
                    let pot = Potential::wick(&table);
                    let init = fit_gaussian(&pot, &lat).sample(&mut r.fork(u64::MAX - 1));
                    let res = pcn_sample(&pot, &lat, chain, Some(init), &r)?;
                    res.samples
                        .iter()
                        .map(|f| Ok(b * potential_rn(f, &table)?))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            Ok(SingularityStat { n, a_n: a, b_n: b, samples })
        })
        .collect()
}
