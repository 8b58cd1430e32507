//! u_N = <1> - <30>_N + v_N for the truncated cubic equation driven by the
//! noise that built the objects.

use std::sync::Arc;

use dynamics::{HermiteForce, Integrator, StepScheme};
use field_core::stats::median;
use field_core::{Lattice, LatticeField, RngStream};
use wick::WickTable;

use crate::decay::{fit_spectrum, fit_spectrum_above, DecayFit};
use crate::{build_objects, NoisePath, ObjectKind, ObjectPath, Result, StochError};

/// u_N at t_k, k = 0..=steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub noise: (u64, u64),
    pub dt: f64,
    pub values: Vec<LatticeField>,
}

/// Solves u'' + u' + (1 - Lap)^alpha u + c pi_N :(pi_N u)^3: = sqrt2 xi with the
/// initial data and noise increments of `path` (Strang splitting, the path's
/// time step).
pub fn evolve_with_path(table: &WickTable, coupling: f64, path: &NoisePath) -> Result<Trajectory> {
    let lat = Arc::new(Lattice::new(table.alpha, table.trunc_n)?);
    let scheme = StepScheme::new(path.dt())?;
    let integ = Integrator::new(&lat, scheme, Some(HermiteForce::cubic(table.sigma_n, coupling)))?;
    let mut s = path.initial(&lat);
    let mut values = Vec::with_capacity(path.steps + 1);
    values.push(s.pos.clone());
    for k in 0..path.steps {
        let xi = path.increment(integ.kernels(), k);
        integ.step_with_increment(&mut s, &xi)?;
        if s.pos.coeffs().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(dynamics::DynamicsError::NonFinite { time: (k + 1) as f64 * path.dt() }.into());
        }
        values.push(s.pos.clone());
    }
    Ok(Trajectory { noise: path.id(), dt: path.dt(), values })
}

/// v_N = u_N - <1> + <30>_N at every time knot.
pub fn second_order_remainder(traj: &Trajectory, lin: &ObjectPath, cub_int: &ObjectPath) -> Result<Vec<LatticeField>> {
    if lin.kind != ObjectKind::Lin || cub_int.kind != ObjectKind::CubInt {
        return Err(StochError::InvalidSetup("expected <1> and <30>".into()));
    }
    if lin.noise != traj.noise || cub_int.noise != traj.noise {
        return Err(StochError::NoiseMismatch);
    }
    let same_grid = |p: &ObjectPath| p.values.len() == traj.values.len() && p.dt == traj.dt;
    if !same_grid(lin) || !same_grid(cub_int) {
        return Err(StochError::InvalidSetup("time grids differ".into()));
    }
    traj.values
        .iter()
        .zip(&lin.values)
        .zip(&cub_int.values)
        .map(|((u, y), z)| Ok(u.sub(y)?.add(z)?))
        .collect()
}

#[derive(Debug, Clone)]
pub struct RemainderReport {
    pub u_fit: DecayFit,
    pub v_fit: DecayFit,
    /// v slope minus u slope (negative when v is smoother).
    pub gap: f64,
    /// The same difference over the shells |n| > 2 only, when there are
    /// at least three of them.
    pub tail_gap: Option<f64>,
    /// Sobolev exponent used for `v_norms`.
    pub s: f64,
    /// (t_k, median over the ensemble of ||v_N(t_k)||_{H^s}).
    pub v_norms: Vec<(f64, f64)>,
}

/// Decay slopes of u_N(1) and v_N(1) over `ensemble` realizations
/// (realization r uses `rng.fork(r)`), and the H^{alpha - 1/2 - eps} norm of v_N
/// along [0, 1].
pub fn remainder_experiment(
    table: &WickTable,
    coupling: f64,
    ensemble: usize,
    steps: usize,
    eps: f64,
    rng: &RngStream,
) -> Result<RemainderReport> {
    if ensemble == 0 {
        return Err(StochError::InvalidSetup("empty ensemble".into()));
    }
    let s = table.alpha - 0.5 - eps;
    let mut u_end = Vec::with_capacity(ensemble);
    let mut v_end = Vec::with_capacity(ensemble);
    let mut norms = vec![Vec::with_capacity(ensemble); steps + 1];
    for r in 0..ensemble {
        let path = NoisePath::new(rng.fork(r as u64), 1.0, steps)?;
        let objs = build_objects(&[ObjectKind::Lin, ObjectKind::CubInt], table, &path)?;
        let traj = evolve_with_path(table, coupling, &path)?;
        let v = second_order_remainder(&traj, &objs[0], &objs[1])?;
        for (k, f) in v.iter().enumerate() {
            norms[k].push(f.sobolev_norm(s));
        }
        u_end.push(traj.values.last().expect("non-empty").clone());
        v_end.push(v.last().expect("non-empty").clone());
    }
    let u_fit = fit_spectrum(&u_end, ObjectKind::Lin.predicted_slope(table.alpha))?;
    let v_fit = fit_spectrum(&v_end, -3.0 - 2.0 * (table.alpha - 0.5))?;
    let tail = |f: &[LatticeField]| fit_spectrum_above(f, 0.0, 2.0).ok().map(|d| d.exponent);
    let tail_gap = tail(&v_end).zip(tail(&u_end)).map(|(v, u)| v - u);
    let dt = 1.0 / steps as f64;
    let v_norms = norms.iter().enumerate().map(|(k, xs)| (k as f64 * dt, median(xs))).collect();
    Ok(RemainderReport { gap: v_fit.exponent - u_fit.exponent, tail_gap, u_fit, v_fit, s, v_norms })
}
