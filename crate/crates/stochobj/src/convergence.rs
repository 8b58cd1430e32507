//! Differences of one object between the truncations N and 2N.

use std::sync::Arc;

use field_core::stats::{linear_fit, median};
use field_core::{Lattice, RngStream};
use wick::WickTable;

use crate::{build_object, NoisePath, ObjectKind, Result, StochError};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub kind: ObjectKind,
    /// Sobolev exponent of the difference norm.
    pub s: f64,
    /// (N, median over the ensemble of ||X_{2N}(1) - X_N(1)||_{H^s}).
    pub rows: Vec<(usize, f64)>,
    /// Decay rate: minus the log-log slope of the medians in N.
    pub gamma: f64,
    pub gamma_se: f64,
}

/// ||X_{2N} - X_N||_{H^s} at t = 1 for each N in `n_list`, both truncations
/// driven by the same noise (realization r uses `rng.fork(r)`).
pub fn convergence_rate(
    kind: ObjectKind,
    alpha: f64,
    n_list: &[usize],
    s: f64,
    ensemble: usize,
    steps: usize,
    rng: &RngStream,
) -> Result<ConvergenceReport> {
    if n_list.len() < 2 || ensemble == 0 {
        return Err(StochError::InvalidSetup("need two N values and a non-empty ensemble".into()));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let (t1, t2) = (WickTable::new(alpha, 2 * n), WickTable::new(alpha, n));
        let fine = Arc::new(Lattice::new(alpha, 2 * n)?);
        let norms = (0..ensemble)
            .map(|r| {
                let path = NoisePath::new(rng.fork(r as u64), 1.0, steps)?;
                let a = build_object(kind, &t1, &path)?.last().clone();
                let b = build_object(kind, &t2, &path)?.last().transfer(&fine);
                Ok(a.sub(&b)?.sobolev_norm(s))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((n, median(&norms)));
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.0 as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let fit = linear_fit(&x, &y);
    Ok(ConvergenceReport { kind, s, rows, gamma: -fit.slope, gamma_se: fit.slope_se })
}
