//! Shell-averaged power spectra and their log-log slopes.

use field_core::stats::linear_fit;
use field_core::{japanese, LatticeField, RngStream};
use wick::WickTable;

use crate::{build_object, NoisePath, ObjectKind, Result, StochError};

/// Dyadic shell lo < |n| <= hi with the mean of |f^(n)|^2 over its modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Mean of log <n> over the shell's modes.
    pub log_bracket: f64,
    pub power: f64,
}

/// Shells (0, 1], (1, 2], (2, 4], ... up to the cutoff, averaged over the
/// ensemble. Shells with fewer than 6 modes are merged into their neighbour.
pub fn shell_spectrum(fields: &[LatticeField]) -> Vec<Shell> {
    let Some(first) = fields.first() else { return Vec::new() };
    let lat = first.lattice();
    let n_cut = lat.trunc_n() as f64;
    let mut edges = vec![0.0];
    let mut hi: f64 = 1.0;
    loop {
        edges.push(hi.min(n_cut));
        if hi >= n_cut {
            break;
        }
        hi *= 2.0;
    }
    let nb = edges.len() - 1;
    let bin = |r: f64| (0..nb).find(|&b| r > edges[b] && r <= edges[b + 1]);
    let mut count = vec![0usize; nb];
    let mut logs = vec![0.0; nb];
    let mut power = vec![0.0; nb];
    for (i, m) in lat.modes().iter().enumerate() {
        let r = (field_core::lattice::norm2(*m) as f64).sqrt();
        if let Some(b) = bin(r) {
            count[b] += 1;
            logs[b] += japanese(*m).ln();
            power[b] += fields.iter().map(|f| f.coeffs()[i].norm_sqr()).sum::<f64>();
        }
    }
    let mut shells: Vec<Shell> = (0..nb)
        .map(|b| Shell { lo: edges[b], hi: edges[b + 1], count: count[b], log_bracket: logs[b], power: power[b] })
        .collect();
    let mut merged: Vec<Shell> = Vec::new();
    let mut carry: Option<Shell> = None;
    for s in shells.drain(..) {
        let s = match carry.take() {
            Some(c) => Shell { lo: c.lo, hi: s.hi, count: c.count + s.count, log_bracket: c.log_bracket + s.log_bracket, power: c.power + s.power },
            None => s,
        };
        if s.count < 6 {
            carry = Some(s);
        } else {
            merged.push(s);
        }
    }
    if let Some(c) = carry {
        match merged.last_mut() {
            Some(l) => {
                l.hi = c.hi;
                l.count += c.count;
                l.log_bracket += c.log_bracket;
                l.power += c.power;
            }
            None => merged.push(c),
        }
    }
    let ne = fields.len() as f64;
    for s in &mut merged {
        s.log_bracket /= s.count as f64;
        s.power /= s.count as f64 * ne;
    }
    merged
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub shells: Vec<Shell>,
}

/// Least-squares slope of log(shell power) against log <n> over all shells.
pub fn fit_spectrum(fields: &[LatticeField], predicted: f64) -> Result<DecayFit> {
    fit_spectrum_above(fields, predicted, 0.0)
}

/// As `fit_spectrum`, restricted to the shells with lower edge >= `r_min`.
pub fn fit_spectrum_above(fields: &[LatticeField], predicted: f64, r_min: f64) -> Result<DecayFit> {
    let shells: Vec<Shell> = shell_spectrum(fields).into_iter().filter(|s| s.lo >= r_min).collect();
    if shells.len() < 3 {
        return Err(StochError::TooFewShells(shells.len()));
    }
    let x: Vec<f64> = shells.iter().map(|s| s.log_bracket).collect();
    let y: Vec<f64> = shells.iter().map(|s| s.power.ln()).collect();
    let fit = linear_fit(&x, &y);
    Ok(DecayFit { exponent: fit.slope, stderr: fit.slope_se, predicted, shells })
}

/// Spectral slope of the object at t = 1 over `ensemble` realizations
/// (realization r uses `rng.fork(r)`), the time grid having `steps` points
/// per unit time.
pub fn fit_decay_exponent(
    kind: ObjectKind,
    table: &WickTable,
    ensemble: usize,
    steps: usize,
    rng: &RngStream,
) -> Result<DecayFit> {
    if ensemble == 0 {
        return Err(StochError::InvalidSetup("empty ensemble".into()));
    }
    let fields = (0..ensemble)
        .map(|r| {
            let path = NoisePath::new(rng.fork(r as u64), 1.0, steps)?;
            Ok(build_object(kind, table, &path)?.last().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    fit_spectrum(&fields, kind.predicted_slope(table.alpha))
}
