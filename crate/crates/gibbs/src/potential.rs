//! Densities e^{-F} relative to the base Gaussian measure.

use std::sync::Arc;

use field_core::{Complex64, Lattice, LatticeField};
use wick::{hermite, potential_rn, wick_power, WickTable};

use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// R_N, plus alpha_N when the table carries it.
    Wick(WickTable),
    /// F(u) = c * u^(0).
    ZeroModeLinear(f64),
}

impl Potential {
    pub fn wick(table: &WickTable) -> Self {
        Potential::Wick(table.clone())
    }

    pub fn eval(&self, f: &LatticeField) -> Result<f64> {
        Ok(match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Wick(t) => potential_rn(f, t)? + t.alpha_n.unwrap_or(0.0),
            Potential::ZeroModeLinear(c) => c * f.coeffs()[0].re,
        })
    }

    /// Coefficients G with dF = sum_n Re(conj G(n) du^(n)).
    pub fn gradient(&self, f: &LatticeField) -> Result<LatticeField> {
        let lat = f.lattice();
        Ok(match self {
            Potential::Zero | Potential::Constant(_) => LatticeField::zeros(lat),
            Potential::Wick(t) => wick_power(f, 3, t.sigma_n)?,
            Potential::ZeroModeLinear(c) => {
                let mut g = LatticeField::zeros(lat);
                g.coeffs_mut()[0] = Complex64::new(*c, 0.0);
                g
            }
        })
    }

    /// Expectation of F under a Gaussian law with mean a in the zero mode and
    /// pointwise variance tau (all other means zero).
    pub fn gaussian_mean(&self, a: f64, tau: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Wick(t) => 0.25 * hermite(4, a, t.sigma_n - tau) + t.alpha_n.unwrap_or(0.0),
            Potential::ZeroModeLinear(c) => c * a,
        }
    }

    /// Lattice the potential's table refers to, if any.
    pub fn lattice(&self) -> Option<Result<Arc<Lattice>>> {
        match self {
            Potential::Wick(t) => Some(Lattice::new(t.alpha, t.trunc_n).map(Arc::new).map_err(Into::into)),
            _ => None,
        }
    }
}
