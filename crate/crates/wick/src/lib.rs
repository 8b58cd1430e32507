//! Wick renormalization for the truncated base Gaussian measure.
//!
//! With w(n) = <n>^{-2 alpha} the variance of u_N(x) is sigma_N = sum_{|n|<=N} w(n)
//! and the Wick powers are :u_N^k: = H_k(u_N; sigma_N). All spatial integrals
//! are spatial means.

use std::sync::Arc;

use field_core::{pointwise_map, pointwise_mean, FieldError, Lattice, LatticeField};
use thiserror::Error;

pub mod hermite;
pub use hermite::{hermite, hermite_all, hermite_derivative};

#[derive(Debug, Error)]
pub enum WickError {
    #[error("wick table for alpha = {alpha}, N = {n} has no alpha_N")]
    MissingAlphaN { alpha: f64, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, WickError>;

/// Number of lattice points with |n|^2 = r2, for r2 = 0..=N^2, inside the ball.
pub fn shell_multiplicities(n_cut: usize) -> Vec<u64> {
    let n = n_cut as i64;
    let r2max = n * n;
    let mut counts = vec![0u64; (r2max + 1) as usize];
    for a in -n..=n {
        for b in -n..=n {
            let ab = a * a + b * b;
            if ab > r2max {
                continue;
            }
            for c in -n..=n {
                let r2 = ab + c * c;
                if r2 <= r2max {
                    counts[r2 as usize] += 1;
                }
            }
        }
    }
    counts
}

/// sigma_N = sum_{|n| <= N} <n>^{-2 alpha}, summed shell by shell.
pub fn sigma_n(alpha: f64, n_cut: usize) -> f64 {
    shell_multiplicities(n_cut)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r2, &c)| c as f64 * (1.0 + r2 as f64).powf(-alpha))
        .sum()
}

/// Physical-space kernel W(x) = sum_{|n| <= N} <n>^{-2 alpha} e^{i n.x} on a lattice
/// with the given grid size.
fn kernel_field(alpha: f64, n_cut: usize, grid_m: usize) -> Result<LatticeField> {
    let lat = Arc::new(Lattice::with_grid(alpha, n_cut, grid_m)?);
    let mut w = LatticeField::zeros(&lat);
    for (i, z) in w.coeffs_mut().iter_mut().enumerate() {
        z.re = lat.weight(i);
    }
    Ok(w)
}

/// C_k(n) = sum_{n_1 + ... + n_k = n, |n_j| <= N} prod w(n_j) for |n| <= out_cut,
/// returned as a field on a lattice of cutoff out_cut (real, even coefficients).
/// This is E|F(:u_N^k:)(n)|^2 / k!.
pub fn convolution_power(alpha: f64, n_cut: usize, k: usize, out_cut: usize) -> Result<LatticeField> {
    let m = field_core::lattice::fft_friendly((k * n_cut + out_cut + 1).max(4 * n_cut + 1));
    let w = kernel_field(alpha, n_cut, m)?;
    let out = Arc::new(Lattice::new(alpha, out_cut.max(1))?);
    let mut c = pointwise_map(&w, k, &out, |x| x.powi(k as i32))?;
    if out_cut == 0 {
        c = c.project(0);
    }
    Ok(c)
}

/// alpha_N = (1/2) int_0^1 E||z_N'(t)||^2_{H^alpha} dt = (3/4) sum_{|n|<=N} w(n) C_3(n).
pub fn alpha_n(alpha: f64, n_cut: usize) -> Result<f64> {
    if n_cut == 0 {
        return Err(WickError::InvalidArgument("N must be >= 1".into()));
    }
    let c3 = convolution_power(alpha, n_cut, 3, n_cut)?;
    let lat = Arc::clone(c3.lattice());
    let s: f64 = (0..lat.len()).map(|i| lat.weight(i) * c3.coeffs()[i].re).sum();
    Ok(0.75 * s)
}

/// sum_{n_1 + ... + n_4 = 0, |n_j| <= N} prod w(n_j); Var_mu(R_N) = 4! * this / 16.
pub fn quartic_contraction_sum(alpha: f64, n_cut: usize) -> Result<f64> {
    let m = field_core::lattice::fft_friendly(4 * n_cut + 1);
    let w = kernel_field(alpha, n_cut, m)?;
    Ok(pointwise_mean(&w, 4, |x| x.powi(4))?)
}

/// Cached (alpha, N, sigma_N, alpha_N).
#[derive(Debug, Clone, PartialEq)]
pub struct WickTable {
    pub alpha: f64,
    pub trunc_n: usize,
    pub sigma_n: f64,
    pub alpha_n: Option<f64>,
}

impl WickTable {
    /// Table with sigma_N only.
    pub fn new(alpha: f64, trunc_n: usize) -> Self {
        Self { alpha, trunc_n, sigma_n: sigma_n(alpha, trunc_n), alpha_n: None }
    }

    /// Table with sigma_N and alpha_N.
    pub fn full(alpha: f64, trunc_n: usize) -> Result<Self> {
        let mut t = Self::new(alpha, trunc_n);
        t.alpha_n = Some(alpha_n(alpha, trunc_n)?);
        Ok(t)
    }

    /// Same (alpha, N) with a different Wick constant, e.g. 0 for a deliberately
    /// wrong renormalization.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma_n: sigma, ..self.clone() }
    }

    fn check(&self, f: &LatticeField) -> Result<()> {
        let lat = f.lattice();
        if lat.trunc_n() != self.trunc_n || lat.alpha().to_bits() != self.alpha.to_bits() {
            return Err(WickError::InvalidArgument(format!(
                "table (alpha {}, N {}) does not match field (alpha {}, N {})",
                self.alpha,
                self.trunc_n,
                lat.alpha(),
                lat.trunc_n()
            )));
        }
        Ok(())
    }
}

/// Coefficients of pi_N H_k(f(x); sigma) on f's lattice (needs M >= (k+1)N + 1).
pub fn wick_power(f: &LatticeField, k: usize, sigma: f64) -> Result<LatticeField> {
    let out = Arc::clone(f.lattice());
    Ok(pointwise_map(f, k, &out, |x| hermite(k, x, sigma))?)
}

/// Coefficients of H_k(f(x); sigma) on the full band |n| <= kN (needs M >= 2kN + 1).
pub fn wick_power_full(f: &LatticeField, k: usize, sigma: f64) -> Result<LatticeField> {
    let lat = f.lattice();
    let out = Arc::new(Lattice::new(lat.alpha(), k * lat.trunc_n())?);
    Ok(pointwise_map(f, k, &out, |x| hermite(k, x, sigma))?)
}

/// R_N(f) = (1/4) mean of H_4(f_N; sigma_N).
pub fn potential_rn(f: &LatticeField, table: &WickTable) -> Result<f64> {
    table.check(f)?;
    let s = table.sigma_n;
    Ok(0.25 * pointwise_mean(f, 4, |x| hermite(4, x, s))?)
}

/// Spatial mean of :f^2: = H_2(f; sigma_N), i.e. sum |f^(n)|^2 - sigma_N.
pub fn wick_square_mean(f: &LatticeField, table: &WickTable) -> f64 {
    f.mean_square() - table.sigma_n
}

/// R_N^diamond(f) = R_N(f) + alpha_N.
pub fn potential_rn_diamond(f: &LatticeField, table: &WickTable) -> Result<f64> {
    let a = table.alpha_n.ok_or(WickError::MissingAlphaN { alpha: table.alpha, n: table.trunc_n })?;
    Ok(potential_rn(f, table)? + a)
}
