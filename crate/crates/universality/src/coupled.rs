//! u_N (force pi_N V_N'(pi_N u)) against u_N^dagger (force kappa pi_N u +
//! 4 abar_2 pi_N :(pi_N u)^3:), both from the same initial data and noise.

use std::sync::Arc;

use dynamics::{DynamicsError, HermiteForce, Integrator, StepScheme};
use field_core::stats::median;
use field_core::{bracket_symbol, sample_gaussian_pair, Lattice, RngStream};

use crate::potential::{check_criticality_positivity, continuum_sigma, MicroPotential};
use crate::renorm::{hermite_potential_vn, kappa_fit};
use crate::{Result, UniversalityError};

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledConfig {
    pub alpha: f64,
    pub t_final: f64,
    pub n_list: Vec<usize>,
    pub ensemble: usize,
    /// Differences are measured in H^{alpha - 3/2 - eps}.
    pub eps: f64,
    /// Time step as a multiple of 0.1 / sqrt([[N]]^2 + m^2), where m^2 is the
    /// larger |linear Hermite coefficient| of the two forces.
    pub dt_factor: f64,
    /// Fitted over N in {16, 32, 64} when `None`.
    pub kappa: Option<f64>,
}

impl Default for CoupledConfig {
    fn default() -> Self {
        Self { alpha: 1.3, t_final: 1.0, n_list: vec![4, 8, 16], ensemble: 8, eps: 0.05, dt_factor: 1.0, kappa: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRow {
    pub n: usize,
    pub dt: f64,
    /// sup over the time grid of ||u_N - u_N^dagger||, one per realization;
    /// infinite when either trajectory became non-finite.
    pub sups: Vec<f64>,
    /// Realizations lost to a non-finite state.
    pub blowups: usize,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledReport {
    pub kappa: f64,
    pub abar2: f64,
    pub rows: Vec<CoupledRow>,
    /// Medians strictly decreasing along `n_list`.
    pub decreasing: bool,
}

/// Realization r at cutoff N uses the stream `rng.fork(N).fork(r)`: initial
/// data from its fork `u64::MAX`, step k noise from its fork k.
pub fn coupled_convergence_experiment(v: &MicroPotential, cfg: &CoupledConfig, rng: &RngStream) -> Result<CoupledReport> {
    if cfg.n_list.is_empty() || cfg.ensemble == 0 || !(cfg.t_final > 0.0) || !(cfg.dt_factor > 0.0) {
        return Err(UniversalityError::InvalidConfig("empty sweep, ensemble or time range".into()));
    }
    let sigma = continuum_sigma(cfg.alpha)?;
    let shape = check_criticality_positivity(v, sigma);
    if !shape.critical {
        return Err(UniversalityError::NotCritical(shape.abar[1]));
    }
    if !shape.positive {
        return Err(UniversalityError::InvalidPotential("positivity condition fails".into()));
    }
    let abar2 = shape.abar[2];
    let kappa = match cfg.kappa {
        Some(k) => k,
        None => kappa_fit(v, cfg.alpha, &[16, 32, 64])?.kappa,
    };
    let s = cfg.alpha - 1.5 - cfg.eps;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let vn = hermite_potential_vn(v, cfg.alpha, n)?;
        let force = vn.force();
        let reference = HermiteForce::reference(vn.sigma_n, kappa, abar2);
        let degree = force.degree().max(3);
        let lat = Arc::new(Lattice::for_degree(cfg.alpha, n, degree)?);
        // the mass term can be stiffer than the fastest linear mode at small N
        let top = bracket_symbol([n as i32, 0, 0], cfg.alpha);
        let mass = force.coeffs.get(1).map_or(0.0, |c| c.abs()).max(kappa.abs());
        let scheme = StepScheme::new(0.1 / (top * top + mass).sqrt() * cfg.dt_factor)?;
        let steps = (cfg.t_final / scheme.dt).ceil() as u64;
        let scheme = StepScheme::new(cfg.t_final / steps as f64)?;
        let model = Integrator::new(&lat, scheme, Some(force))?;
        let dagger = Integrator::new(&lat, scheme, Some(reference))?;
        let stream_n = rng.fork(n as u64);
        let sups = (0..cfg.ensemble as u64)
            .map(|r| {
                let stream = stream_n.fork(r);
                let init = sample_gaussian_pair(&lat, &mut stream.fork(u64::MAX));
                let (mut a, mut b) = (init.clone(), init);
                let mut sup = 0.0f64;
                for k in 0..steps {
                    let stepped = model.step(&mut a, &stream, k).and_then(|_| dagger.step(&mut b, &stream, k));
                    match stepped {
                        Ok(()) => {}
                        Err(DynamicsError::NonFinite { .. }) => return Ok(f64::INFINITY),
                        Err(e) => return Err(e.into()),
                    }
                    sup = sup.max(a.pos.sub(&b.pos)?.sobolev_norm(s));
                }
                Ok(sup)
            })
            .collect::<Result<Vec<_>>>()?;
        let blowups = sups.iter().filter(|x| x.is_infinite()).count();
        rows.push(CoupledRow { n, dt: scheme.dt, median: median(&sups), sups, blowups });
    }
    let decreasing = rows.windows(2).all(|w| w[1].median < w[0].median);
    Ok(CoupledReport { kappa, abar2, rows, decreasing })
}
