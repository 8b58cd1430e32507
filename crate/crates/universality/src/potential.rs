//! Even polynomial potentials and their Gaussian averages.

use crate::{Result, UniversalityError};

/// V(z) = sum_{j=0}^m a_j z^{2j} with m >= 2 and a_m != 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroPotential {
    coeffs: Vec<f64>,
}

impl MicroPotential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(UniversalityError::InvalidPotential(format!("degree {} < 4", 2 * coeffs.len().saturating_sub(1))));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(UniversalityError::InvalidPotential("non-finite coefficient".into()));
        }
        if *coeffs.last().unwrap() == 0.0 {
            return Err(UniversalityError::InvalidPotential("leading coefficient is zero".into()));
        }
        Ok(Self { coeffs })
    }

    /// a3 z^6 + a2 z^4 + a1 z^2 with a1 chosen so that abar_1 = 0 at `sigma`.
    pub fn critical_sextic(a3: f64, a2: f64, sigma: f64) -> Self {
        Self { coeffs: vec![0.0, -45.0 * a3 * sigma * sigma - 6.0 * a2 * sigma, a2, a3] }
    }

    /// The critical sextic with leading coefficient a3 and abar_2 = 1.
    pub fn unit_quartic_sextic(a3: f64, sigma: f64) -> Self {
        Self::critical_sextic(a3, 1.0 - 15.0 * a3 * sigma, sigma)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// m, half the degree.
    pub fn half_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: f64) -> f64 {
        let z2 = z * z;
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * z2 + a)
    }

    /// <V>(z) = E V(z + N(0, sigma)) by Gauss-Hermite quadrature with `nodes` points.
    pub fn averaged_by_quadrature(&self, z: f64, sigma: f64, nodes: usize) -> f64 {
        let s = (2.0 * sigma).sqrt();
        gauss_hermite(nodes).iter().map(|(x, w)| w * self.eval(z + s * x)).sum::<f64>() / std::f64::consts::PI.sqrt()
    }
}

/// sigma = int_{|xi| <= 1} |xi|^{-2 alpha} d xi = 4 pi / (3 - 2 alpha).
pub fn continuum_sigma(alpha: f64) -> Result<f64> {
    if !(alpha < 1.5) {
        return Err(UniversalityError::Divergent(alpha));
    }
    Ok(4.0 * std::f64::consts::PI / (3.0 - 2.0 * alpha))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn odd_double_factorial(k: usize) -> f64 {
    // (2k - 1)!!, with (-1)!! = 1
    (1..=k).fold(1.0, |acc, i| acc * (2 * i - 1) as f64)
}

/// abar_j = E[V^{(2j)}(N(0, sigma))] / (2j)!
///        = sum_{l >= j} C(2l, 2j) (2l - 2j - 1)!! a_l sigma^{l - j}.
pub fn averaged_coeffs(v: &MicroPotential, sigma: f64) -> Vec<f64> {
    let a = v.coeffs();
    (0..a.len())
        .map(|j| {
            (j..a.len())
                .map(|l| binomial(2 * l, 2 * j) * odd_double_factorial(l - j) * a[l] * sigma.powi((l - j) as i32))
                .sum()
        })
        .collect()
}

/// Nodes and weights of the n-point Gauss-Hermite rule for the weight e^{-x^2}.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * out[0].0,
            3 => 1.91 * z - 0.91 * out[1].0,
            _ => 2.0 * z - out[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // orthonormal recurrence
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j - 1) as f64 / j as f64).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        out[i] = (z, w);
        out[n - 1 - i] = (-z, w);
    }
    out.reverse();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub abar: Vec<f64>,
    pub critical: bool,
    pub positive: bool,
}

/// Criticality |abar_1| <= 1e-12 x (largest term of its sum), and positivity of
/// P(y) = sum_{j >= 2} abar_j y^{j-2} on y >= 0.
pub fn check_criticality_positivity(v: &MicroPotential, sigma: f64) -> ShapeReport {
    let abar = averaged_coeffs(v, sigma);
    let a = v.coeffs();
    let scale = (1..a.len())
        .map(|l| (binomial(2 * l, 2) * odd_double_factorial(l - 1) * a[l] * sigma.powi((l - 1) as i32)).abs())
        .fold(0.0, f64::max);
    let critical = abar[1].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE);
    let positive = positive_on_half_line(&abar[2..]);
    ShapeReport { abar, critical, positive }
}

/// True when p(y) = sum_k p_k y^k has positive leading coefficient, p(0) > 0 and
/// no root in (0, inf), the latter by a Sturm sequence.
fn positive_on_half_line(p: &[f64]) -> bool {
    let p = trim(p.to_vec());
    if p.is_empty() || p[0] <= 0.0 || *p.last().unwrap() <= 0.0 {
        return false;
    }
    if p.len() == 1 {
        return true;
    }
    let seq = sturm(&p);
    let changes = |vals: Vec<f64>| {
        let v: Vec<f64> = vals.into_iter().filter(|x| *x != 0.0).collect();
        v.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    };
    let at_zero = changes(seq.iter().map(|q| q[0]).collect());
    let at_inf = changes(seq.iter().map(|q| *q.last().unwrap()).collect());
    at_zero == at_inf
}

fn trim(mut p: Vec<f64>) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    while p.last().is_some_and(|x| x.abs() <= 1e-14 * scale) {
        p.pop();
    }
    p
}

fn sturm(p: &[f64]) -> Vec<Vec<f64>> {
    let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let mut seq = vec![p.to_vec(), dp];
    loop {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        let r = trim(r.into_iter().map(|x| -x).collect());
        if r.is_empty() {
            break;
        }
        let done = r.len() == 1;
        seq.push(r);
        if done {
            break;
        }
    }
    seq
}

fn poly_rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r[r.len() - 1] / b[db];
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= q * bk;
        }
        r.pop();
    }
    r
}
