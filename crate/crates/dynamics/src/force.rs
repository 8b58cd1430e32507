//! Pointwise forces given by Hermite expansions F(x) = sum_k c_k H_k(x; sigma).

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteForce {
    pub sigma: f64,
    pub coeffs: Vec<f64>,
}

impl HermiteForce {
    /// c :x^3: = c (x^3 - 3 sigma x).
    pub fn cubic(sigma: f64, c: f64) -> Self {
        Self { sigma, coeffs: vec![0.0, 0.0, 0.0, c] }
    }

    /// kappa x + 4 abar2 :x^3:.
    pub fn reference(sigma: f64, kappa: f64, a2bar: f64) -> Self {
        Self { sigma, coeffs: vec![0.0, kappa, 0.0, 4.0 * a2bar] }
    }

    /// Derivative of the even potential sum_j c_j H_{2j}(x; sigma); the j = 0
    /// term drops out.
    pub fn from_potential(sigma: f64, even_coeffs: &[f64]) -> Self {
        let deg = 2 * even_coeffs.len().saturating_sub(1);
        let mut coeffs = vec![0.0; deg.max(1)];
        for (j, &c) in even_coeffs.iter().enumerate().skip(1) {
            coeffs[2 * j - 1] += 2.0 * j as f64 * c;
        }
        Self { sigma, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0, x);
        let mut acc = self.coeffs[0];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            if k > 1 {
                let h2 = x * h1 - self.sigma * (k - 1) as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            acc += c * h1;
        }
        acc
    }
}
