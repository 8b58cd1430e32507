//! Finite-N coefficients: s~_N, abar_{j,N}, the Hermite expansion of V_N and
//! the finite-size constant kappa.

use dynamics::HermiteForce;
use field_core::stats::linear_fit;
use wick::{hermite, hermite_derivative, sigma_n};

use crate::potential::{averaged_coeffs, check_criticality_positivity, continuum_sigma, MicroPotential};
use crate::{Result, UniversalityError};

#[derive(Debug, Clone, PartialEq)]
pub struct RenormCoeffs {
    pub n_cut: usize,
    pub sigma_n: f64,
    /// s~_N = N^{-2 beta} sigma_N.
    pub sigma_tilde: f64,
    /// abar_{j,N}, the averaged coefficients at variance s~_N.
    pub abar_n: Vec<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 1.5) {
        return Err(UniversalityError::InvalidConfig(format!("alpha = {alpha} not in (1, 3/2)")));
    }
    Ok(())
}

pub fn renorm_coeffs_n(v: &MicroPotential, alpha: f64, n_cut: usize) -> Result<RenormCoeffs> {
    check_alpha(alpha)?;
    if n_cut == 0 {
        return Err(UniversalityError::InvalidConfig("N must be >= 1".into()));
    }
    let sn = sigma_n(alpha, n_cut);
    let st = (n_cut as f64).powf(2.0 * alpha - 3.0) * sn;
    Ok(RenormCoeffs { n_cut, sigma_n: sn, sigma_tilde: st, abar_n: averaged_coeffs(v, st) })
}

/// V_N(z) = sum_j c_j H_{2j}(z; sigma_N), c_j = abar_{j,N} N^{-(2j - 4) beta}.
#[derive(Debug, Clone, PartialEq)]
pub struct VnCoeffs {
    pub n_cut: usize,
    pub sigma_n: f64,
    pub coeffs: Vec<f64>,
}

impl VnCoeffs {
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(j, c)| c * hermite(2 * j, z, self.sigma_n)).sum()
    }

    /// V_N'(z) from H_k' = k H_{k-1}; c_0 drops out.
    pub fn derivative(&self, z: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * hermite_derivative(2 * j, z, self.sigma_n)).sum()
    }

    /// Odd Hermite coefficients of V_N': the coefficient of H_{2j-1} is 2j c_j.
    pub fn derivative_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.coeffs.len() - 2];
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            out[2 * j - 1] = 2.0 * j as f64 * c;
        }
        out
    }

    /// The pointwise force pi_N V_N'(pi_N u).
    pub fn force(&self) -> HermiteForce {
        HermiteForce::from_potential(self.sigma_n, &self.coeffs)
    }
}

pub fn hermite_potential_vn(v: &MicroPotential, alpha: f64, n_cut: usize) -> Result<VnCoeffs> {
    let r = renorm_coeffs_n(v, alpha, n_cut)?;
    let beta = 1.5 - alpha;
    let nf = n_cut as f64;
    let coeffs = r
        .abar_n
        .iter()
        .enumerate()
        .map(|(j, a)| a * nf.powf(-(2.0 * j as f64 - 4.0) * beta))
        .collect();
    Ok(VnCoeffs { n_cut, sigma_n: r.sigma_n, coeffs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaFit {
    pub kappa: f64,
    pub stderr: f64,
    /// Coefficient of the nuisance term N^{2 beta - min(1, 4 beta)}.
    pub nuisance: f64,
    /// (N, 2 N^{2 beta} (abar_{1,N} - abar_1)).
    pub points: Vec<(usize, f64)>,
}

/// kappa from abar_{1,N} = abar_1 + (kappa / 2) N^{-2 beta} + d N^{-min(1, 4 beta)}
/// by least squares over `n_list`, for a critical V.
pub fn kappa_fit(v: &MicroPotential, alpha: f64, n_list: &[usize]) -> Result<KappaFit> {
    check_alpha(alpha)?;
    let sigma_tilde = n_list
        .iter()
        .map(|&n| Ok((n, renorm_coeffs_n(v, alpha, n)?.sigma_tilde)))
        .collect::<Result<Vec<_>>>()?;
    kappa_fit_with(v, alpha, &sigma_tilde)
}

/// As `kappa_fit`, with the values s~_N supplied.
pub fn kappa_fit_with(v: &MicroPotential, alpha: f64, sigma_tilde: &[(usize, f64)]) -> Result<KappaFit> {
    check_alpha(alpha)?;
    if sigma_tilde.len() < 3 {
        return Err(UniversalityError::InvalidConfig("kappa fit needs at least three N values".into()));
    }
    let sigma = continuum_sigma(alpha)?;
    let shape = check_criticality_positivity(v, sigma);
    if !shape.critical {
        return Err(UniversalityError::NotCritical(shape.abar[1]));
    }
    let beta = 1.5 - alpha;
    let p = 2.0 * beta - f64::min(1.0, 4.0 * beta);
    let points: Vec<(usize, f64)> = sigma_tilde
        .iter()
        .map(|&(n, st)| {
            let a1n = averaged_coeffs(v, st)[1];
            (n, 2.0 * (n as f64).powf(2.0 * beta) * (a1n - shape.abar[1]))
        })
        .collect();
    let x: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).powf(p)).collect();
    let y: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let fit = linear_fit(&x, &y);
    let (kappa, stderr) = if fit.slope.is_finite() { (fit.intercept, fit.intercept_se) } else { (0.0, 0.0) };
    Ok(KappaFit { kappa, stderr, nuisance: fit.slope, points })
}
