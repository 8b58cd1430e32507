//! Variational upper bound on -log Z_N over adapted drifts.
//!
//! For a drift theta, piecewise constant on the K uniform sub-intervals of
//! [0, 1] and adapted to the noise, the controlled field
//! X(t_{k+1}) = X(t_k) + dt <n>^{-alpha} theta_k + <n>^{-alpha} (B(t_{k+1}) - B(t_k))
//! gives -log E_mu[e^{-F}] <= E[F(X(1)) + (1/2) sum_k dt ||theta_k||^2_{L^2}].
//! The drift is theta_k = theta0_k - g_{k,s} <n>^{alpha} X(t_k): an open-loop part
//! plus an optional linear feedback with one gain per time step and shell
//! |n|^2 = s. Gradients are computed by the discrete adjoint and averaged over
//! a fixed set of noise paths; the reported objective is re-estimated on fresh
//! paths.

use std::collections::BTreeMap;
use std::sync::Arc;

use field_core::stats::mean_se;
use field_core::{sample_white, Complex64, Lattice, LatticeField, RngStream};

use crate::gaussian_fit::GaussianFit;
use crate::potential::Potential;
use crate::{GibbsError, Result};

/// Drift values on the sub-intervals [t_k, t_{k+1}), t_k = k / time_knots.
#[derive(Debug, Clone)]
pub struct DriftPath {
    pub time_knots: usize,
    pub values: Vec<LatticeField>,
}

impl DriftPath {
    pub fn zeros(lat: &Arc<Lattice>, time_knots: usize) -> Self {
        Self { time_knots, values: vec![LatticeField::zeros(lat); time_knots] }
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.time_knots as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_knots == 0 || self.values.len() != self.time_knots {
            return Err(GibbsError::GridMismatch(format!(
                "{} values for {} sub-intervals",
                self.values.len(),
                self.time_knots
            )));
        }
        Ok(())
    }

    /// (1/2) int_0^1 ||theta||^2 dt.
    pub fn energy(&self) -> f64 {
        0.5 * self.dt() * self.values.iter().map(|v| v.mean_square()).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct Control {
    pub open: DriftPath,
    /// gains[k][s] for time step k and shell index s; `None` for open loop.
    pub gains: Option<Vec<Vec<f64>>>,
}

/// Distinct |n|^2 values of the lattice, and the shell index of every mode.
pub fn shells(lat: &Lattice) -> (Vec<i64>, Vec<usize>) {
    let mut ids = BTreeMap::new();
    for m in lat.modes() {
        ids.insert(field_core::lattice::norm2(*m), 0usize);
    }
    for (k, v) in ids.values_mut().enumerate() {
        *v = k;
    }
    let of = lat.modes().iter().map(|m| ids[&field_core::lattice::norm2(*m)]).collect();
    (ids.keys().cloned().collect(), of)
}

impl Control {
    pub fn open_loop(lat: &Arc<Lattice>, time_knots: usize) -> Self {
        Self { open: DriftPath::zeros(lat, time_knots), gains: None }
    }

    pub fn with_feedback(lat: &Arc<Lattice>, time_knots: usize) -> Self {
        let ns = shells(lat).0.len();
        Self { open: DriftPath::zeros(lat, time_knots), gains: Some(vec![vec![0.0; ns]; time_knots]) }
    }

    /// Feedback whose terminal law approximates the fitted Gaussian: the exact
    /// optimal control for the quadratic cost -log(dq/dmu), computed by the
    /// backward Riccati recursion P_k = P_{k+1} / (1 + v dt P_{k+1}) per shell
    /// (and likewise for the zero-mode push).
    pub fn from_gaussian_fit(fit: &GaussianFit, time_knots: usize) -> Self {
        let lat = fit.lattice();
        let dt = 1.0 / time_knots as f64;
        let (sh, of) = shells(lat);
        let mut p_end = vec![0.0; sh.len()];
        let mut v_of = vec![1.0; sh.len()];
        for (i, &s) in of.iter().enumerate() {
            let v = lat.weight(i);
            v_of[s] = v;
            p_end[s] = (v / fit.variance(i) - 1.0) / v;
        }
        let mut gains = vec![vec![0.0; sh.len()]; time_knots];
        let mut open = DriftPath::zeros(lat, time_knots);
        let mut p = p_end;
        let mut q0 = fit.a / fit.variance(0);
        for k in (0..time_knots).rev() {
            for s in 0..sh.len() {
                let sk = 1.0 + v_of[s] * dt * p[s];
                gains[k][s] = v_of[s] * p[s] / sk;
                if s == of[0] {
                    open.values[k].coeffs_mut()[0] = Complex64::new(q0 / sk, 0.0);
                    q0 /= sk;
                }
                p[s] /= sk;
            }
        }
        Self { open, gains: Some(gains) }
    }

    pub fn time_knots(&self) -> usize {
        self.open.time_knots
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdConfig {
    /// Noise paths reused at every optimizer step.
    pub paths: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub gain_learning_rate: f64,
    /// Fresh paths for the final estimate.
    pub eval_paths: usize,
    /// Open-loop drift is trained on modes with |n| <= this cutoff only
    /// (0: the zero mode alone, which suffices for translation-invariant F).
    pub open_cutoff: usize,
}

impl Default for BdConfig {
    fn default() -> Self {
        Self { paths: 128, iterations: 200, learning_rate: 0.05, gain_learning_rate: 0.5, eval_paths: 1000, open_cutoff: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct BdResult {
    /// Fresh-path estimate of the objective (an upper bound on -log Z_N).
    pub objective: f64,
    pub stderr: f64,
    pub control: Control,
    /// Ensemble mean of theta_k over the evaluation paths.
    pub mean_drift: DriftPath,
    /// Common-random-number objective at every optimizer step.
    pub history: Vec<f64>,
}

struct Grads {
    open: Vec<Vec<Complex64>>,
    gains: Vec<Vec<f64>>,
}

struct Sim<'a> {
    pot: &'a Potential,
    lat: &'a Arc<Lattice>,
    shell_of: Vec<usize>,
    /// <n>^{-alpha}
    g: Vec<f64>,
}

impl Sim<'_> {
    fn noise(&self, rng: &RngStream, k: usize) -> LatticeField {
        sample_white(self.lat, &mut rng.fork(k as u64))
    }

    /// Cost of one path; with `grads`, accumulates the adjoint gradient and,
    /// with `drift_sum`, the drift values.
    fn path(
        &self,
        ctl: &Control,
        noise: &[LatticeField],
        grads: Option<&mut Grads>,
        drift_sum: Option<&mut [LatticeField]>,
    ) -> Result<f64> {
        let kk = ctl.time_knots();
        let dt = 1.0 / kk as f64;
        let sdt = dt.sqrt();
        let len = self.lat.len();
        let mut x = vec![Complex64::new(0.0, 0.0); len];
        let mut xs = Vec::with_capacity(kk);
        let mut thetas = Vec::with_capacity(kk);
        let mut energy = 0.0;
        for k in 0..kk {
            let th0 = ctl.open.values[k].coeffs();
            let xi = noise[k].coeffs();
            let mut th = vec![Complex64::new(0.0, 0.0); len];
            for i in 0..len {
                let gain = ctl.gains.as_ref().map_or(0.0, |gs| gs[k][self.shell_of[i]]);
                th[i] = th0[i] - x[i] * (gain / self.g[i]);
                energy += 0.5 * dt * th[i].norm_sqr();
            }
            let xn: Vec<Complex64> =
                (0..len).map(|i| x[i] + th[i] * (dt * self.g[i]) + xi[i] * (sdt * self.g[i])).collect();
            xs.push(std::mem::replace(&mut x, xn));
            thetas.push(th);
        }
        let xf = LatticeField::from_coeffs(self.lat, x)?;
        let cost = self.pot.eval(&xf)? + energy;
        if let Some(ds) = drift_sum {
            for (d, th) in ds.iter_mut().zip(&thetas) {
                for (a, b) in d.coeffs_mut().iter_mut().zip(th) {
                    *a += b;
                }
            }
        }
        if let Some(gr) = grads {
            let mut p = self.pot.gradient(&xf)?.into_coeffs();
            for k in (0..kk).rev() {
                let th = &thetas[k];
                let xk = &xs[k];
                for i in 0..len {
                    let gi = self.g[i];
                    let e = p[i] * gi + th[i];
                    gr.open[k][i] += e * dt;
                    if let Some(gs) = &ctl.gains {
                        let gain = gs[k][self.shell_of[i]];
                        gr.gains[k][self.shell_of[i]] -= dt / gi * (e.conj() * xk[i]).re;
                        let d = (p[i] + th[i] / gi) * (gain * dt);
                        p[i] -= d;
                    }
                }
            }
        }
        Ok(cost)
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    fn step(&mut self, x: &mut [f64], g: &[f64], lr: &[f64]) {
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-12);
        self.t += 1;
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        for i in 0..x.len() {
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * g[i];
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * g[i] * g[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            x[i] -= lr[i] * mh / (vh.sqrt() + eps);
        }
    }
}

fn flatten(ctl: &Control) -> Vec<f64> {
    let mut out = Vec::new();
    for v in &ctl.open.values {
        for z in v.coeffs() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    if let Some(gs) = &ctl.gains {
        for g in gs {
            out.extend_from_slice(g);
        }
    }
    out
}

fn unflatten(ctl: &mut Control, x: &[f64]) {
    let mut it = x.iter();
    for v in &mut ctl.open.values {
        for z in v.coeffs_mut() {
            *z = Complex64::new(*it.next().unwrap(), *it.next().unwrap());
        }
    }
    if let Some(gs) = &mut ctl.gains {
        for g in gs {
            for a in g {
                *a = *it.next().unwrap();
            }
        }
    }
}

fn crn_gradient(sim: &Sim, ctl: &Control, noise: &[Vec<LatticeField>]) -> Result<(f64, Vec<f64>)> {
    let kk = ctl.time_knots();
    let len = sim.lat.len();
    let ns = shells(sim.lat).0.len();
    let mut gr = Grads { open: vec![vec![Complex64::new(0.0, 0.0); len]; kk], gains: vec![vec![0.0; ns]; kk] };
    let mut total = 0.0;
    for nz in noise {
        total += sim.path(ctl, nz, Some(&mut gr), None)?;
    }
    let scale = 1.0 / noise.len() as f64;
    let mut flat = Vec::new();
    for g in &gr.open {
        for z in g {
            flat.push(z.re * scale);
            flat.push(z.im * scale);
        }
    }
    if ctl.gains.is_some() {
        for g in &gr.gains {
            flat.extend(g.iter().map(|v| v * scale));
        }
    }
    Ok((total * scale, flat))
}

/// Common-random-number objective over `paths` noise paths (`rng.fork(p)`) and
/// its adjoint gradient, flattened as (re, im) of every open-loop coefficient
/// per time step, then the gains. For Hermitian perturbations of the open-loop
/// drift, dJ = sum_k sum_n Re(conj(G_k(n)) d theta0_k(n)).
pub fn objective_gradient(
    pot: &Potential,
    lat: &Arc<Lattice>,
    ctl: &Control,
    paths: usize,
    rng: &RngStream,
) -> Result<(f64, Vec<f64>)> {
    let sim = Sim { pot, lat, shell_of: shells(lat).1, g: (0..lat.len()).map(|i| lat.weight(i).sqrt()).collect() };
    let kk = ctl.time_knots();
    let noise: Vec<Vec<LatticeField>> = (0..paths)
        .map(|p| {
            let r = rng.fork(p as u64);
            (0..kk).map(|k| sim.noise(&r, k)).collect()
        })
        .collect();
    crn_gradient(&sim, ctl, &noise)
}

/// Stochastic-gradient minimization of the Boue-Dupuis objective for
/// F = `pot`, starting from `init`. Optimizer paths use `rng.fork(p)`,
/// evaluation paths `rng.fork(2^40 + p)`.
pub fn boue_dupuis_minimize(
    pot: &Potential,
    lat: &Arc<Lattice>,
    init: Control,
    cfg: &BdConfig,
    rng: &RngStream,
) -> Result<BdResult> {
    init.open.validate()?;
    let kk = init.time_knots();
    if let Some(gs) = &init.gains {
        let ns = shells(lat).0.len();
        if gs.len() != kk || gs.iter().any(|g| g.len() != ns) {
            return Err(GibbsError::GridMismatch("gain table does not match knots and shells".into()));
        }
    }
    if init.open.values.iter().any(|v| v.lattice() != lat) {
        return Err(GibbsError::InvalidConfig("drift lattice differs from the target lattice".into()));
    }
    if cfg.paths == 0 || cfg.eval_paths < 2 {
        return Err(GibbsError::InvalidConfig("need at least one optimizer path and two evaluation paths".into()));
    }
    let sim = Sim {
        pot,
        lat,
        shell_of: shells(lat).1,
        g: (0..lat.len()).map(|i| lat.weight(i).sqrt()).collect(),
    };
    let noise: Vec<Vec<LatticeField>> = (0..cfg.paths)
        .map(|p| {
            let r = rng.fork(p as u64);
            (0..kk).map(|k| sim.noise(&r, k)).collect()
        })
        .collect();
    let mut ctl = init;
    let mut x = flatten(&ctl);
    let n_open = 2 * kk * lat.len();
    let cut2 = (cfg.open_cutoff * cfg.open_cutoff) as i64;
    let lr: Vec<f64> = (0..x.len())
        .map(|i| {
            if i >= n_open {
                cfg.gain_learning_rate
            } else if field_core::lattice::norm2(lat.mode((i / 2) % lat.len())) <= cut2 {
                cfg.learning_rate
            } else {
                0.0
            }
        })
        .collect();
    let mut adam = Adam::new(x.len());
    let mut history = Vec::with_capacity(cfg.iterations);
    for it in 0..cfg.iterations {
        let (obj, flat) = crn_gradient(&sim, &ctl, &noise)?;
        if !obj.is_finite() || obj.abs() > 1e12 {
            return Err(GibbsError::Divergent { iteration: it, value: obj });
        }
        history.push(obj);
        adam.step(&mut x, &flat, &lr);
        unflatten(&mut ctl, &x);
    }
    let mut drift_sum = vec![LatticeField::zeros(lat); kk];
    let mut costs = Vec::with_capacity(cfg.eval_paths);
    for p in 0..cfg.eval_paths {
        let r = rng.fork((1u64 << 40) + p as u64);
        let nz: Vec<LatticeField> = (0..kk).map(|k| sim.noise(&r, k)).collect();
        costs.push(sim.path(&ctl, &nz, None, Some(&mut drift_sum))?);
    }
    let (objective, stderr) = mean_se(&costs);
    if !objective.is_finite() {
        return Err(GibbsError::Divergent { iteration: cfg.iterations, value: objective });
    }
    let mean_drift = DriftPath {
        time_knots: kk,
        values: drift_sum.iter().map(|d| d.scaled(1.0 / cfg.eval_paths as f64)).collect(),
    };
    Ok(BdResult { objective, stderr, control: ctl, mean_drift, history })
}
