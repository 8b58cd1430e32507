//! Best Gaussian approximation of rho_N in the Gibbs-Bogoliubov sense.
//!
//! Over Gaussian laws q with zero-mode mean a and diagonal covariance
//! v_q(n) = 1 / (<n>^{2 alpha} + m^2), the bound
//! -log Z <= E_q F + KL(q | mu) is minimized. For F = R_N the stationarity
//! conditions reduce to a scalar self-consistency equation for m^2.

use std::sync::Arc;

use field_core::{sample_with_variance, Complex64, Lattice, LatticeField, RngStream};

use crate::potential::Potential;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    /// Zero-mode mean (the law is symmetrized to +-a when the potential is even).
    pub a: f64,
    pub mass2: f64,
    /// Whether q is the symmetric mixture of the laws centred at +a and -a.
    pub mixture: bool,
    /// E_q F + KL(q | mu) for the single Gaussian centred at +a.
    pub bound: f64,
    lat: Arc<Lattice>,
    var_q: Vec<f64>,
}

fn base_var(lat: &Lattice, i: usize) -> f64 {
    lat.weight(i)
}

fn variances(lat: &Lattice, mass2: f64) -> Vec<f64> {
    (0..lat.len()).map(|i| 1.0 / (1.0 / lat.weight(i) + mass2)).collect()
}

/// E_q F + KL(q | mu) for the Gaussian centred at a with mass m^2.
pub fn gibbs_bogoliubov(pot: &Potential, lat: &Lattice, a: f64, mass2: f64) -> f64 {
    let vq = variances(lat, mass2);
    let tau: f64 = vq.iter().sum();
    let kl: f64 = vq
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = v / base_var(lat, i);
            0.5 * (r - 1.0 - r.ln())
        })
        .sum::<f64>()
        + 0.5 * a * a;
    pot.gaussian_mean(a, tau) + kl
}

/// Minimizes the Gibbs-Bogoliubov bound over (a, m^2).
pub fn fit_gaussian(pot: &Potential, lat: &Arc<Lattice>) -> GaussianFit {
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    match pot {
        Potential::ZeroModeLinear(c) => cands.push((-c, 0.0)),
        Potential::Wick(t) => {
            let sigma = t.sigma_n;
            let tau = |g: f64| variances(lat, 2.0 * g).iter().sum::<f64>();
            let h = |g: f64| 3.0 * (sigma - tau(g)) - 1.5 - g;
            let mut roots = Vec::new();
            let (lo, hi) = (1e-8f64, 3.0 * sigma.max(1.0));
            let steps = 400;
            let grid: Vec<f64> = (0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)).collect();
            for w in grid.windows(2) {
                let (mut x0, mut x1) = (w[0], w[1]);
                let (h0, h1) = (h(x0), h(x1));
                if h0.signum() == h1.signum() {
                    continue;
                }
                let s0 = h0.signum();
                for _ in 0..100 {
                    let xm = 0.5 * (x0 + x1);
                    if h(xm).signum() == s0 {
                        x0 = xm;
                    } else {
                        x1 = xm;
                    }
                }
                roots.push(0.5 * (x0 + x1));
            }
            for g in roots {
                let c = sigma - tau(g);
                if 3.0 * c > 1.0 {
                    cands.push(((3.0 * c - 1.0).sqrt(), 2.0 * g));
                }
            }
        }
        Potential::Zero | Potential::Constant(_) => {}
    }
    let (a, mass2, bound) = cands
        .into_iter()
        .map(|(a, m)| (a, m, gibbs_bogoliubov(pot, lat, a, m)))
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("at least one candidate");
    let mixture = a != 0.0 && matches!(pot, Potential::Wick(_));
    GaussianFit { a, mass2, mixture, bound, lat: Arc::clone(lat), var_q: variances(lat, mass2) }
}

impl GaussianFit {
    /// Moment-matched Gaussian from samples of rho_N: per-shell variances, and
    /// zero-mode mean |u^(0)| and variance, all variances multiplied by `inflate`.
    /// `mass2` and `bound` are left at NaN.
    pub fn from_samples(lat: &Arc<Lattice>, samples: &[LatticeField], inflate: f64) -> Self {
        let (sh, of) = crate::variational::shells(lat);
        let mut acc = vec![0.0; sh.len()];
        let mut cnt = vec![0.0; sh.len()];
        let n = samples.len() as f64;
        for f in samples {
            for (i, z) in f.coeffs().iter().enumerate().skip(1) {
                acc[of[i]] += z.norm_sqr();
                cnt[of[i]] += 1.0;
            }
        }
        let zero: Vec<f64> = samples.iter().map(|f| f.coeffs()[0].re.abs()).collect();
        let a = zero.iter().sum::<f64>() / n;
        let v0 = zero.iter().map(|x| (x - a).powi(2)).sum::<f64>() / (n - 1.0);
        let var_q = (0..lat.len())
            .map(|i| inflate * if i == 0 { v0 } else { acc[of[i]] / cnt[of[i]] })
            .collect();
        GaussianFit { a, mass2: f64::NAN, mixture: a > 0.0, bound: f64::NAN, lat: Arc::clone(lat), var_q }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    /// E|u^(n)|^2 under q (without the mean) at storage index i.
    pub fn variance(&self, i: usize) -> f64 {
        self.var_q[i]
    }

    pub fn sample(&self, rng: &mut RngStream) -> LatticeField {
        let mut f = sample_with_variance(&self.lat, rng, |i| self.var_q[i]);
        let sign = if self.mixture && rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        f.coeffs_mut()[0] += Complex64::new(sign * self.a, 0.0);
        f
    }

    /// log (d mu / d q)(u).
    pub fn log_density_ratio(&self, f: &LatticeField) -> f64 {
        let lat = &self.lat;
        let c = f.coeffs();
        let mut s = 0.0;
        for i in 1..lat.len() {
            if !lat.is_representative(i) {
                continue;
            }
            let (vm, vq) = (base_var(lat, i), self.var_q[i]);
            let z2 = c[i].norm_sqr();
            s += -z2 / vm + z2 / vq - vm.ln() + vq.ln();
        }
        let x = c[0].re;
        let v0 = self.var_q[0];
        let log_mu0 = -0.5 * x * x;
        let lq = |m: f64| -0.5 * (x - m).powi(2) / v0 - 0.5 * v0.ln();
        let log_q0 = if self.mixture {
            let (p, q) = (lq(self.a), lq(-self.a));
            let mx = p.max(q);
            mx + (0.5 * ((p - mx).exp() + (q - mx).exp())).ln()
        } else {
            lq(self.a)
        };
        s + log_mu0 - log_q0
    }
}
