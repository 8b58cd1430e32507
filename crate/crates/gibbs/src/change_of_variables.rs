//! Shifted drift Upsilon' = Theta' + z_N' with z_N'(t) = (1 - Delta)^{-alpha} :Y_N(t)^3:.
//!
//! Y_N(t) = sum_{|n| <= N} <n>^{-alpha} B_n(t) e_n has pointwise variance t sigma_N,
//! and Theta'(t) = <n>^{-alpha} theta(t).

use std::sync::Arc;

use field_core::{sample_white, Lattice, LatticeField, RngStream};
use wick::{wick_power, WickError, WickTable};

use crate::variational::DriftPath;
use crate::{GibbsError, Result};

/// Brownian field path sampled at t_k = k / time_knots, k = 0..=time_knots.
#[derive(Debug, Clone)]
pub struct YPath {
    pub time_knots: usize,
    pub values: Vec<LatticeField>,
}

/// Y_N on the uniform grid; increment k uses `rng.fork(k)`.
pub fn sample_y_path(lat: &Arc<Lattice>, time_knots: usize, rng: &RngStream) -> YPath {
    let sdt = (1.0 / time_knots as f64).sqrt();
    let mut values = Vec::with_capacity(time_knots + 1);
    let mut y = LatticeField::zeros(lat);
    values.push(y.clone());
    for k in 0..time_knots {
        let xi = sample_white(lat, &mut rng.fork(k as u64));
        let inc = xi.apply_multiplier(|n| sdt * field_core::japanese(n).powf(-lat.alpha()));
        y = y.add(&inc).expect("same lattice");
        values.push(y.clone());
    }
    YPath { time_knots, values }
}

/// z_N'(t) for a field y = Y_N(t).
pub fn zdot(table: &WickTable, y: &LatticeField, t: f64) -> Result<LatticeField> {
    let h3 = wick_power(y, 3, t * table.sigma_n)?;
    let lat = Arc::clone(y.lattice());
    let mut out = h3;
    for (i, z) in out.coeffs_mut().iter_mut().enumerate() {
        *z *= lat.weight(i);
    }
    Ok(out)
}

fn h_alpha_sq(f: &LatticeField) -> f64 {
    let lat = f.lattice();
    f.coeffs().iter().enumerate().map(|(i, z)| z.norm_sqr() / lat.weight(i)).sum()
}

fn theta_dot(theta: &LatticeField) -> LatticeField {
    let lat = Arc::clone(theta.lattice());
    let mut out = theta.clone();
    for (i, z) in out.coeffs_mut().iter_mut().enumerate() {
        *z *= lat.weight(i).sqrt();
    }
    out
}

fn check_grid(y: &YPath, theta: &DriftPath) -> Result<()> {
    theta.validate()?;
    if y.values.len() != y.time_knots + 1 || y.time_knots != theta.time_knots {
        return Err(GibbsError::GridMismatch(format!(
            "path has {} knots ({} values), drift has {}",
            y.time_knots,
            y.values.len(),
            theta.time_knots
        )));
    }
    Ok(())
}

/// Upsilon'(t_k) = Theta'_k + z_N'(t_k) for k = 0..K-1 (right-continuous values).
pub fn drift_change_of_variables(table: &WickTable, y_path: &YPath, theta: &DriftPath) -> Result<DriftPath> {
    check_grid(y_path, theta)?;
    let dt = theta.dt();
    let values = (0..theta.time_knots)
        .map(|k| {
            let z = zdot(table, &y_path.values[k], k as f64 * dt)?;
            Ok(theta_dot(&theta.values[k]).add(&z)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DriftPath { time_knots: theta.time_knots, values })
}

/// Both sides of the change-of-variables identity on one path, time integrals by
/// the trapezoid rule on each sub-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    /// int :Y_N(1)^3: Theta(1) dx + (1/2) int_0^1 ||theta||^2 dt
    pub lhs: f64,
    /// (1/2) int_0^1 ||Upsilon'||^2_{H^alpha} dt - alpha_N
    pub rhs: f64,
    /// (1/2) int_0^1 ||z_N'||^2_{H^alpha} dt
    pub z_energy: f64,
}

pub fn identity_sides(table: &WickTable, y_path: &YPath, theta: &DriftPath) -> Result<IdentitySides> {
    check_grid(y_path, theta)?;
    let alpha_n = table
        .alpha_n
        .ok_or(GibbsError::Wick(WickError::MissingAlphaN { alpha: table.alpha, n: table.trunc_n }))?;
    let kk = theta.time_knots;
    let dt = theta.dt();
    let zs = (0..=kk)
        .map(|k| zdot(table, &y_path.values[k], k as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    let lat = Arc::clone(zs[0].lattice());
    let mut z_energy = 0.0;
    let mut ups = 0.0;
    let mut cap_theta = LatticeField::zeros(&lat);
    let mut theta_energy = 0.0;
    for k in 0..kk {
        let td = theta_dot(&theta.values[k]);
        z_energy += 0.25 * dt * (h_alpha_sq(&zs[k]) + h_alpha_sq(&zs[k + 1]));
        ups += 0.25 * dt * (h_alpha_sq(&td.add(&zs[k])?) + h_alpha_sq(&td.add(&zs[k + 1])?));
        cap_theta.axpy(dt, &td)?;
        theta_energy += 0.5 * dt * theta.values[k].mean_square();
    }
    let cube_one: f64 = zs[kk]
        .coeffs()
        .iter()
        .zip(cap_theta.coeffs())
        .enumerate()
        .map(|(i, (z, c))| (z * c.conj()).re / lat.weight(i))
        .sum();
    Ok(IdentitySides { lhs: cube_one + theta_energy, rhs: ups - alpha_n, z_energy })
}
