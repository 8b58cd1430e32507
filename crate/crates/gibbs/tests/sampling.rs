use std::sync::Arc;

use field_core::stats::{integrated_autocorr_time, mean_se};
use field_core::{sample_gaussian, Complex64, Lattice, RngStream};
use gibbs::gaussian_fit::gibbs_bogoliubov;
use gibbs::importance::importance_sample;
use gibbs::*;
use wick::{potential_rn, WickTable};

fn lattice(alpha: f64, n: usize) -> Arc<Lattice> {
    Arc::new(Lattice::new(alpha, n).unwrap())
}

#[test]
fn zero_potential_always_accepts_and_keeps_mu() {
    let lat = lattice(1.3, 1);
    let cfg = ChainConfig { pcn_beta: 0.6, burn_in: 100, thinning: 1, chain_len: 40100, adapt: false, ..Default::default() };
    let res = pcn_sample(&Potential::Zero, &lat, &cfg, None, &RngStream::new(5, 0)).unwrap();
    assert_eq!(res.acceptance, 1.0);
    for i in 0..lat.len() {
        let xs: Vec<f64> = res.samples.iter().map(|f| f.coeffs()[i].norm_sqr()).collect();
        let tau = integrated_autocorr_time(&xs);
        let (m, se) = mean_se(&xs);
        let se = se * tau.sqrt();
        assert!((m - lat.weight(i)).abs() < 3.0 * se, "mode {i}: {m} vs {} (se {se})", lat.weight(i));
    }
}

#[test]
fn degenerate_configs_rejected() {
    let lat = lattice(1.3, 1);
    let bad = [
        ChainConfig { pcn_beta: 0.0, ..Default::default() },
        ChainConfig { pcn_beta: 1.5, ..Default::default() },
        ChainConfig { burn_in: 10, chain_len: 10, ..Default::default() },
        ChainConfig { thinning: 0, ..Default::default() },
    ];
    for cfg in bad {
        assert!(matches!(
            pcn_sample(&Potential::Zero, &lat, &cfg, None, &RngStream::new(1, 0)),
            Err(GibbsError::InvalidConfig(_))
        ));
    }
}

#[test]
fn trivial_partition_functions() {
    let lat = lattice(1.3, 2);
    let rng = RngStream::new(3, 0);
    let z = estimate_logz_importance(&Potential::Zero, &lat, &Proposal::Prior, 1000, &rng).unwrap();
    assert_eq!(z.log_z, 0.0);
    assert_eq!(z.stderr, 0.0);
    let c = estimate_logz_importance(&Potential::Constant(2.5), &lat, &Proposal::Prior, 1000, &rng).unwrap();
    assert!((c.log_z + 2.5).abs() < 1e-12);
    assert!((c.ess - 1000.0).abs() < 1e-6);
    assert!(matches!(
        estimate_logz_importance(&Potential::Zero, &lat, &Proposal::Prior, 999, &rng),
        Err(GibbsError::InvalidConfig(_))
    ));
}

#[test]
fn linear_potential_partition_function() {
    // E_mu e^{-c u(0)} = e^{c^2 / 2}, and the fitted Gaussian is exact.
    let lat = lattice(1.3, 2);
    let pot = Potential::ZeroModeLinear(0.8);
    let fit = fit_gaussian(&pot, &lat);
    assert!((fit.a + 0.8).abs() < 1e-12);
    assert!((fit.bound + 0.32).abs() < 1e-12);
    let z = estimate_logz_importance(&pot, &lat, &Proposal::Fitted(fit), 1000, &RngStream::new(1, 1)).unwrap();
    assert!((z.log_z - 0.32).abs() < 1e-10);
    let zp = estimate_logz_importance(&pot, &lat, &Proposal::Prior, 20000, &RngStream::new(1, 2)).unwrap();
    assert!((zp.log_z - 0.32).abs() < 3.0 * zp.stderr, "{} +- {}", zp.log_z, zp.stderr);
}

#[test]
fn underflow_is_reported() {
    let lat = lattice(1.3, 1);
    let pot = Potential::Constant(f64::INFINITY);
    assert!(matches!(
        estimate_logz_importance(&pot, &lat, &Proposal::Prior, 1000, &RngStream::new(1, 0)),
        Err(GibbsError::WeightUnderflow(_))
    ));
}

#[test]
fn density_ratio_of_fitted_gaussian() {
    // Check log(dmu/dq) against the explicit Gaussian densities of the real
    // coordinates (zero mode, and Re/Im of each representative).
    let lat = lattice(1.2, 2);
    let table = WickTable::new(1.2, 2);
    let fit = fit_gaussian(&Potential::wick(&table), &lat);
    let mut rng = RngStream::new(4, 4);
    let f = fit.sample(&mut rng);
    let logn = |x: f64, m: f64, v: f64| -0.5 * (x - m).powi(2) / v - 0.5 * (2.0 * std::f64::consts::PI * v).ln();
    let mut lmu = 0.0;
    let mut lq = 0.0;
    for i in 0..lat.len() {
        let z = f.coeffs()[i];
        if i == 0 {
            lmu += logn(z.re, 0.0, 1.0);
            let (p, q) = (logn(z.re, fit.a, fit.variance(0)), logn(z.re, -fit.a, fit.variance(0)));
            lq += if fit.mixture { (0.5 * (p.exp() + q.exp())).ln() } else { p };
        } else if lat.is_representative(i) {
            for x in [z.re, z.im] {
                lmu += logn(x, 0.0, 0.5 * lat.weight(i));
                lq += logn(x, 0.0, 0.5 * fit.variance(i));
            }
        }
    }
    assert!((fit.log_density_ratio(&f) - (lmu - lq)).abs() < 1e-9);
}

#[test]
fn gibbs_bogoliubov_matches_monte_carlo() {
    // E_q R_N for the Gaussian centred at a with mass m^2, by sampling.
    let (alpha, n) = (1.3, 2);
    let lat = lattice(alpha, n);
    let table = WickTable::new(alpha, n);
    let pot = Potential::wick(&table);
    let fit = fit_gaussian(&pot, &lat);
    let single = GaussianFitSingle(&fit);
    let vals: Vec<f64> = (0..4000)
        .map(|i| {
            let f = single.sample(&mut RngStream::new(9, i));
            potential_rn(&f, &table).unwrap()
        })
        .collect();
    let (m, se) = mean_se(&vals);
    let tau: f64 = (0..lat.len()).map(|i| fit.variance(i)).sum();
    let exact = pot.gaussian_mean(fit.a, tau);
    assert!((m - exact).abs() < 3.0 * se, "{m} vs {exact} (se {se})");
    // the bound is the optimum of the profile
    let b = fit.bound;
    for (da, dm) in [(0.05, 0.0), (-0.05, 0.0), (0.0, 0.5), (0.0, -0.5)] {
        assert!(gibbs_bogoliubov(&pot, &lat, fit.a + da, fit.mass2 + dm) >= b - 1e-9);
    }
}

struct GaussianFitSingle<'a>(&'a GaussianFit);

impl GaussianFitSingle<'_> {
    fn sample(&self, rng: &mut RngStream) -> field_core::LatticeField {
        let f = self.0;
        let mut u = field_core::sample_with_variance(f.lattice(), rng, |i| f.variance(i));
        u.coeffs_mut()[0] += Complex64::new(f.a, 0.0);
        u
    }
}

#[test]
fn zero_mode_marginal_matches_quadrature() {
    // N = 1: the chain histogram of u^(0) against p(x) ~ phi(x) E[e^{-R(x + Y')}],
    // the inner expectation over the nonzero modes by plain Monte Carlo.
    let (alpha, n) = (1.3, 1);
    let lat = lattice(alpha, n);
    let table = WickTable::new(alpha, n);
    let pot = Potential::wick(&table);
    let cfg = ChainConfig { pcn_beta: 0.5, burn_in: 2000, thinning: 1, chain_len: 202_000, adapt: true, ..Default::default() };
    let res = pcn_sample(&pot, &lat, &cfg, None, &RngStream::new(11, 0)).unwrap();
    let xs: Vec<f64> = res.samples.iter().map(|f| f.coeffs()[0].re).collect();
    let tau = integrated_autocorr_time(&xs);

    let inner: Vec<field_core::LatticeField> = (0..3000)
        .map(|i| {
            let mut f = sample_gaussian(&lat, &mut RngStream::new(12, i));
            f.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
            f
        })
        .collect();
    let h = 0.05;
    let grid: Vec<f64> = (0..=240).map(|k| -6.0 + h * k as f64).collect();
    let dens: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let s: f64 = inner
                .iter()
                .map(|y| {
                    let mut f = y.clone();
                    f.coeffs_mut()[0] = Complex64::new(x, 0.0);
                    (-potential_rn(&f, &table).unwrap()).exp()
                })
                .sum::<f64>();
            (-0.5 * x * x).exp() * s / inner.len() as f64
        })
        .collect();
    let total: f64 = dens.iter().sum::<f64>() * h;
    let edges: Vec<f64> = (0..=12).map(|k| -6.0 + k as f64).collect();
    let neff = xs.len() as f64 / tau;
    for w in edges.windows(2) {
        let p: f64 = grid
            .iter()
            .zip(&dens)
            .filter(|(x, _)| **x >= w[0] && **x < w[1])
            .map(|(_, d)| d * h)
            .sum::<f64>()
            / total;
        let p_hat = xs.iter().filter(|x| **x >= w[0] && **x < w[1]).count() as f64 / xs.len() as f64;
        let tol = 4.0 * (p * (1.0 - p) / neff).sqrt() + 0.01;
        assert!((p - p_hat).abs() < tol, "bin {:?}: quadrature {p}, chain {p_hat}, tol {tol}", w);
    }
}

#[test]
fn chain_and_importance_agree_on_wick_square() {
    let (alpha, n) = (1.3, 2);
    let lat = lattice(alpha, n);
    let table = WickTable::full(alpha, n).unwrap();
    let pot = Potential::wick(&table);
    let fit = fit_gaussian(&pot, &lat);
    let cfg = ChainConfig { pcn_beta: 0.1, burn_in: 5000, thinning: 10, chain_len: 65_000, ..Default::default() };
    let chain = pcn_sample(&pot, &lat, &cfg, Some(fit.sample(&mut RngStream::new(7, 1))), &RngStream::new(7, 0)).unwrap();
    assert!(chain.acceptance > 0.1 && chain.acceptance < 0.5, "acceptance {}", chain.acceptance);
    let (mc, mc_se) = chain.trace_mean();
    let prop = Proposal::Fitted(GaussianFit::from_samples(&lat, &chain.samples, 1.0));
    let shift = table.sigma_n;
    let is = importance_sample(&pot, &lat, &prop, 20_000, &RngStream::new(8, 0), |f| f.mean_square() - shift).unwrap();
    let (im, im_se) = is.observable_mean();
    let comb = (mc_se * mc_se + im_se * im_se).sqrt();
    assert!((mc - im).abs() < 3.0 * comb, "chain {mc} +- {mc_se}, importance {im} +- {im_se}");
}
