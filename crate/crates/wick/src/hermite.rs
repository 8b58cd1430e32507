//! Hermite polynomials with variance parameter, generating function
//! e^{tx - sigma t^2 / 2} = sum_k t^k / k! H_k(x; sigma).

/// H_k(x; sigma) by H_{k+1} = x H_k - sigma k H_{k-1}.
pub fn hermite(k: usize, x: f64, sigma: f64) -> f64 {
    let mut h0 = 1.0;
    if k == 0 {
        return h0;
    }
    let mut h1 = x;
    for j in 1..k {
        let h2 = x * h1 - sigma * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// [H_0, ..., H_k] at (x, sigma).
pub fn hermite_all(k: usize, x: f64, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(x);
    }
    for j in 1..k {
        let h = x * out[j] - sigma * j as f64 * out[j - 1];
        out.push(h);
    }
    out
}

/// d/dx H_k(x; sigma) = k H_{k-1}(x; sigma).
pub fn hermite_derivative(k: usize, x: f64, sigma: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * hermite(k - 1, x, sigma)
    }
}
