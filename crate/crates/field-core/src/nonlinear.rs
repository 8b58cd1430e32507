//! Pointwise nonlinearities evaluated on a zero-padded grid.
//!
//! A degree-k polynomial of a field with band N has band kN. Sampling it on an
//! M-grid folds frequency n onto n mod M, so the coefficients for |n| <= K are
//! exact as soon as M >= kN + K + 1.

use std::sync::Arc;

use crate::error::{FieldError, Result};
use crate::fft::with_grid;
use crate::field::LatticeField;
use crate::lattice::Lattice;

fn require(have: usize, need: usize) -> Result<()> {
    if have < need {
        Err(FieldError::GridTooSmall { need, have })
    } else {
        Ok(())
    }
}

/// Coefficients on `out` of the real field x -> map(f(x)), where `map` is a
/// polynomial of degree at most `degree`. The grid is the one of `f`'s lattice.
pub fn pointwise_map(
    f: &LatticeField,
    degree: usize,
    out: &Arc<Lattice>,
    map: impl Fn(f64) -> f64,
) -> Result<LatticeField> {
    let m = f.lattice().grid_m();
    require(m, degree * f.lattice().trunc_n() + out.trunc_n() + 1)?;
    Ok(with_grid(m, |g| {
        g.synthesize(f);
        for z in g.values_mut() {
            z.re = map(z.re);
            z.im = 0.0;
        }
        g.analyze(out)
    }))
}

/// Two fields at once through one complex transform.
pub fn pointwise_map_pair(
    f: &LatticeField,
    h: &LatticeField,
    degree: usize,
    out: &Arc<Lattice>,
    map: impl Fn(f64) -> f64,
) -> Result<(LatticeField, LatticeField)> {
    let m = f.lattice().grid_m();
    if f.lattice() != h.lattice() && **f.lattice() != **h.lattice() {
        return Err(FieldError::LatticeMismatch);
    }
    require(m, degree * f.lattice().trunc_n() + out.trunc_n() + 1)?;
    Ok(with_grid(m, |g| {
        g.synthesize_pair(f, h);
        for z in g.values_mut() {
            z.re = map(z.re);
            z.im = map(z.im);
        }
        g.analyze_pair(out)
    }))
}

/// Coefficients on `out` of x -> map(f(x), h(x)) for a polynomial `map` of
/// total degree at most `degree`.
pub fn pointwise_map2(
    f: &LatticeField,
    h: &LatticeField,
    degree: usize,
    out: &Arc<Lattice>,
    map: impl Fn(f64, f64) -> f64,
) -> Result<LatticeField> {
    let m = f.lattice().grid_m();
    if f.lattice() != h.lattice() && **f.lattice() != **h.lattice() {
        return Err(FieldError::LatticeMismatch);
    }
    require(m, degree * f.lattice().trunc_n() + out.trunc_n() + 1)?;
    Ok(with_grid(m, |g| {
        g.synthesize_pair(f, h);
        for z in g.values_mut() {
            z.re = map(z.re, z.im);
            z.im = 0.0;
        }
        g.analyze(out)
    }))
}

/// Spatial mean of map(f(x)); exact for polynomials of degree <= `degree`
/// when M >= degree * N + 1.
pub fn pointwise_mean(f: &LatticeField, degree: usize, map: impl Fn(f64) -> f64) -> Result<f64> {
    let m = f.lattice().grid_m();
    require(m, degree * f.lattice().trunc_n() + 1)?;
    Ok(with_grid(m, |g| {
        g.synthesize(f);
        let s: f64 = g.values().iter().map(|z| map(z.re)).sum();
        s / (m * m * m) as f64
    }))
}

/// Exact coefficients of f^k on the full band |n| <= kN.
/// Needs M >= 2kN + 1 on f's lattice.
pub fn dealiased_power(f: &LatticeField, k: usize) -> Result<LatticeField> {
    let lat = f.lattice();
    let out = Arc::new(Lattice::new(lat.alpha(), k * lat.trunc_n())?);
    pointwise_map(f, k, &out, |x| x.powi(k as i32))
}

/// pi_N(f^k) on f's own lattice. Needs M >= (k+1)N + 1.
pub fn projected_power(f: &LatticeField, k: usize) -> Result<LatticeField> {
    let out = Arc::clone(f.lattice());
    pointwise_map(f, k, &out, |x| x.powi(k as i32))
}
