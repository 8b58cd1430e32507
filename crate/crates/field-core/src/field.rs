//! Spectral coefficients of real fields and (position, velocity) pairs.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{FieldError, Result};
use crate::lattice::{japanese, Lattice};

/// Fourier coefficients u^(n), |n| <= N, of a real field
/// u(x) = sum_n u^(n) e^{i n.x}.
#[derive(Debug, Clone)]
pub struct LatticeField {
    lat: Arc<Lattice>,
    coeffs: Vec<Complex64>,
}

impl LatticeField {
    pub fn zeros(lat: &Arc<Lattice>) -> Self {
        Self { lat: Arc::clone(lat), coeffs: vec![Complex64::new(0.0, 0.0); lat.len()] }
    }

    /// Takes coefficients in storage order. Hermitian symmetry is the caller's
    /// responsibility; see [`LatticeField::symmetrize`].
    pub fn from_coeffs(lat: &Arc<Lattice>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lat.len() {
            return Err(FieldError::LatticeMismatch);
        }
        Ok(Self { lat: Arc::clone(lat), coeffs })
    }

    /// Field with u^(n) = f(n); f must itself satisfy f(-n) = conj f(n).
    pub fn from_fn(lat: &Arc<Lattice>, f: impl Fn([i32; 3]) -> Complex64) -> Self {
        let coeffs = lat.modes().iter().map(|&m| f(m)).collect();
        Self { lat: Arc::clone(lat), coeffs }
    }

    /// Constant field c.
    pub fn constant(lat: &Arc<Lattice>, c: f64) -> Self {
        let mut f = Self::zeros(lat);
        f.coeffs[0] = Complex64::new(c, 0.0);
        f
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// u^(n), zero outside the ball.
    pub fn get(&self, m: [i32; 3]) -> Complex64 {
        self.lat.index_of(m).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Sets u^(n) = z and u^(-n) = conj z. For n = 0 only the real part is kept.
    pub fn set_pair(&mut self, m: [i32; 3], z: Complex64) {
        if let Some(i) = self.lat.index_of(m) {
            let j = self.lat.conj_index(i);
            if i == j {
                self.coeffs[i] = Complex64::new(z.re, 0.0);
            } else {
                self.coeffs[i] = z;
                self.coeffs[j] = z.conj();
            }
        }
    }

    /// Projects onto Hermitian-symmetric coefficients: (u(n) + conj u(-n)) / 2.
    pub fn symmetrize(&mut self) {
        for i in 0..self.coeffs.len() {
            let j = self.lat.conj_index(i);
            if i <= j {
                let z = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
                self.coeffs[i] = z;
                self.coeffs[j] = z.conj();
            }
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.lat.conj_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lat, &other.lat) || *self.lat == *other.lat {
            Ok(())
        } else {
            Err(FieldError::LatticeMismatch)
        }
    }

    /// self += a * other
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { lat: Arc::clone(&self.lat), coeffs: self.coeffs.iter().map(|z| a * z).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    /// Multiplies every mode by a real Fourier multiplier m(n).
    pub fn apply_multiplier(&self, m: impl Fn([i32; 3]) -> f64) -> Self {
        let coeffs = self
            .lat
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(&n, z)| m(n) * z)
            .collect();
        Self { lat: Arc::clone(&self.lat), coeffs }
    }

    /// pi_{n_cut}: keeps |n| <= n_cut, zeroes the rest.
    pub fn project(&self, n_cut: usize) -> Self {
        let r2 = (n_cut as i64) * (n_cut as i64);
        let coeffs = self
            .lat
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(&n, &z)| if crate::lattice::norm2(n) <= r2 { z } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self { lat: Arc::clone(&self.lat), coeffs }
    }

    /// Re-expresses the field on another lattice (truncating or zero-extending).
    pub fn transfer(&self, target: &Arc<Lattice>) -> Self {
        let mut out = Self::zeros(target);
        for (i, &m) in target.modes().iter().enumerate() {
            out.coeffs[i] = self.get(m);
        }
        out
    }

    /// sum_n <n>^{2s} |u^(n)|^2
    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        self.lat
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(&n, z)| japanese(n).powf(2.0 * s) * z.norm_sqr())
            .sum()
    }

    /// (sum_n <n>^{2s} |u^(n)|^2)^{1/2}
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    /// Spatial mean of u^2, equal to sum |u^(n)|^2 by Parseval.
    pub fn mean_square(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Spatial mean of u, i.e. u^(0).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }
}

/// sobolev_norm as a free function.
pub fn sobolev_norm(f: &LatticeField, s: f64) -> f64 {
    f.sobolev_norm(s)
}

/// pi_{n_cut} as a free function.
pub fn project(f: &LatticeField, n_cut: usize) -> LatticeField {
    f.project(n_cut)
}

/// The unknown (u, d_t u).
#[derive(Debug, Clone)]
pub struct PhaseState {
    pub pos: LatticeField,
    pub vel: LatticeField,
}

impl PhaseState {
    pub fn new(pos: LatticeField, vel: LatticeField) -> Result<Self> {
        pos.check_same(&vel)?;
        Ok(Self { pos, vel })
    }

    pub fn zeros(lat: &Arc<Lattice>) -> Self {
        Self { pos: LatticeField::zeros(lat), vel: LatticeField::zeros(lat) }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.pos.lattice()
    }
}
