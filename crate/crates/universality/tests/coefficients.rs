use std::f64::consts::PI;

use proptest::prelude::*;
use universality::*;

// E V(z + N(0, sigma)) by the trapezoid rule on a wide grid
fn averaged_trapezoid(v: &MicroPotential, z: f64, sigma: f64) -> f64 {
    let (pts, half) = (8001, 14.0 * sigma.sqrt());
    let h = 2.0 * half / (pts - 1) as f64;
    (0..pts)
        .map(|i| {
            let y = -half + h * i as f64;
            let w = if i == 0 || i == pts - 1 { 0.5 } else { 1.0 };
            w * v.eval(z + y) * (-y * y / (2.0 * sigma)).exp()
        })
        .sum::<f64>()
        * h
        / (2.0 * PI * sigma).sqrt()
}

fn poly(abar: &[f64], z: f64) -> f64 {
    abar.iter().rev().fold(0.0, |acc, a| acc * z * z + a)
}

#[test]
fn continuum_sigma_values() {
    assert!((continuum_sigma(1.25).unwrap() - 8.0 * PI).abs() < 1e-12);
    assert!((continuum_sigma(1.25).unwrap() - 25.1327412).abs() < 1e-7);
    assert!((continuum_sigma(1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    assert!(matches!(continuum_sigma(1.5), Err(UniversalityError::Divergent(_))));
}

#[test]
fn quartic_and_quadratic_averages() {
    let s = 1.7;
    let quartic = MicroPotential::new(vec![0.0, 0.0, 1.0]).unwrap();
    let a = averaged_coeffs(&quartic, s);
    assert!((a[0] - 3.0 * s * s).abs() < 1e-12 && (a[1] - 6.0 * s).abs() < 1e-12 && a[2] == 1.0);
    // adding z^2 adds abar_1 = 1, abar_0 = sigma
    let mixed = MicroPotential::new(vec![0.0, 1.0, 1.0]).unwrap();
    let b = averaged_coeffs(&mixed, s);
    assert!((b[0] - a[0] - s).abs() < 1e-12 && (b[1] - a[1] - 1.0).abs() < 1e-12);
}

#[test]
fn critical_sextic_is_critical() {
    for (a3, a2, s) in [(1.0, 0.0, 2.0), (1.0, 3.5, 25.1), (0.01, -2.0, 31.4)] {
        let v = MicroPotential::critical_sextic(a3, a2, s);
        let a = averaged_coeffs(&v, s);
        assert!(a[1].abs() < 1e-9 * 45.0 * s * s, "{a:?}");
        assert!((a[2] - (15.0 * a3 * s + a2)).abs() < 1e-9 * (1.0 + a2.abs()));
        assert!(check_criticality_positivity(&v, s).critical);
    }
    let u = MicroPotential::unit_quartic_sextic(0.01, 31.4);
    assert!((averaged_coeffs(&u, 31.4)[2] - 1.0).abs() < 1e-10);
}

#[test]
fn invalid_potentials() {
    assert!(MicroPotential::new(vec![1.0, 2.0]).is_err());
    assert!(MicroPotential::new(vec![1.0, 2.0, 0.0]).is_err());
    assert!(MicroPotential::new(vec![1.0, f64::NAN, 1.0]).is_err());
}

#[test]
fn gauss_hermite_moments() {
    for n in [4usize, 7, 12] {
        let rule = gauss_hermite(n);
        assert!(rule.windows(2).all(|w| w[0].0 < w[1].0));
        // int x^{2k} e^{-x^2} dx = sqrt(pi) (2k - 1)!! / 2^k, exact for 2k <= 2n - 1
        let mut exact = PI.sqrt();
        for k in 0..n {
            let q: f64 = rule.iter().map(|(x, w)| w * x.powi(2 * k as i32)).sum();
            assert!((q - exact).abs() < 1e-12 * exact, "n={n} k={k}: {q} vs {exact}");
            let odd: f64 = rule.iter().map(|(x, w)| w * x.powi(2 * k as i32 + 1)).sum();
            assert!(odd.abs() < 1e-12 * exact.max(1.0));
            exact *= (2 * k + 1) as f64 / 2.0;
        }
    }
}

#[test]
fn positivity_cases() {
    let s = 2.0;
    let quartic = MicroPotential::new(vec![0.0, 0.0, 1.0]).unwrap();
    let r = check_criticality_positivity(&quartic, s);
    assert!(!r.critical && r.positive);
    let sextic = MicroPotential::critical_sextic(1.0, 0.5, s);
    let r = check_criticality_positivity(&sextic, s);
    assert!(r.critical && r.positive);
    let negative = MicroPotential::new(vec![0.0, 0.0, -1.0]).unwrap();
    assert!(!check_criticality_positivity(&negative, s).positive);
    // at sigma = 0, abar = a and P(y) can be read off
    let p = |c: Vec<f64>| {
        let mut a = vec![0.0, 0.0];
        a.extend(c);
        check_criticality_positivity(&MicroPotential::new(a).unwrap(), 0.0).positive
    };
    assert!(!p(vec![1.0, -3.0, 1.0])); // y^2 - 3y + 1: two positive roots
    assert!(p(vec![1.0, -1.0, 1.0])); // no real roots
    assert!(p(vec![1.0, 3.0, 1.0])); // negative roots only
    assert!(!p(vec![0.0, 1.0])); // root at y = 0
    assert!(!p(vec![1.0, -2.0, 1.0])); // double root at y = 1
    assert!(!p(vec![2.0, -5.0, 0.0, 1.0])); // y^3 - 5y + 2 vanishes at y = 2
}

#[test]
fn renormalized_variance_converges() {
    let alpha = 1.25;
    let sigma = continuum_sigma(alpha).unwrap();
    let v = MicroPotential::critical_sextic(1.0, 0.0, sigma);
    let ns = [8usize, 16, 32, 64];
    let rs: Vec<RenormCoeffs> = ns.iter().map(|&n| renorm_coeffs_n(&v, alpha, n).unwrap()).collect();
    for r in &rs {
        let direct = wick::sigma_n(alpha, r.n_cut) * (r.n_cut as f64).powf(-(3.0 - 2.0 * alpha));
        assert!((r.sigma_tilde - direct).abs() < 1e-12 * direct);
    }
    let gaps: Vec<f64> = rs.iter().map(|r| (r.sigma_tilde - sigma).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let rate = -field_core::stats::linear_fit(&x, &y).slope;
    assert!((rate - 2.0 * (1.5 - alpha)).abs() < 0.2, "rate {rate}");
    let abar2 = averaged_coeffs(&v, sigma)[2];
    let d2: Vec<f64> = rs.iter().map(|r| (r.abar_n[2] - abar2).abs()).collect();
    assert!(d2.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn vn_is_the_rescaled_potential() {
    let alpha = 1.3;
    let sigma = continuum_sigma(alpha).unwrap();
    let v = MicroPotential::critical_sextic(1.0, 2.0, sigma);
    for n in [2usize, 4, 8] {
        let vn = hermite_potential_vn(&v, alpha, n).unwrap();
        let b = 1.5 - alpha;
        let nf = n as f64;
        let zs: Vec<f64> = (0..=60).map(|k| -3.0 + 0.1 * k as f64).collect();
        let dscale = zs.iter().map(|&z| vn.derivative(z).abs()).fold(1.0, f64::max);
        for &z in &zs {
            let direct = nf.powf(4.0 * b) * v.eval(z * nf.powf(-b));
            let got = vn.eval(z);
            assert!((got - direct).abs() < 1e-8 * direct.abs().max(1.0), "N={n} z={z}: {got} vs {direct}");
            let h = 1e-4;
            let fd = (vn.eval(z + h) - vn.eval(z - h)) / (2.0 * h);
            let d = vn.derivative(z);
            assert!((d - fd).abs() < 1e-6 * dscale, "N={n} z={z}: {d} vs {fd}");
            assert!((vn.force().eval(z) - d).abs() < 1e-12 * dscale);
        }
        let dc = vn.derivative_coeffs();
        assert_eq!(dc.len(), 6);
        assert!((dc[1] - 2.0 * vn.coeffs[1]).abs() < 1e-12 * vn.coeffs[1].abs());
    }
}

#[test]
fn kappa_fit_properties() {
    let alpha = 1.3;
    let sigma = continuum_sigma(alpha).unwrap();
    let v = MicroPotential::unit_quartic_sextic(0.01, sigma);
    let forced: Vec<(usize, f64)> = [8, 16, 32].iter().map(|&n| (n, sigma)).collect();
    let k0 = kappa_fit_with(&v, alpha, &forced).unwrap();
    assert_eq!(k0.kappa, 0.0);
    let a = kappa_fit(&v, alpha, &[16, 32, 64]).unwrap();
    let b = kappa_fit(&v, alpha, &[32, 64, 128]).unwrap();
    assert!((a.kappa - b.kappa).abs() < 0.1 * a.kappa.abs(), "{} vs {}", a.kappa, b.kappa);
    // first order: abar_{1,N} - abar_1 ~ abar_1'(sigma) (s~_N - sigma), and s~_N < sigma
    let slope = 90.0 * 0.01 * sigma + 6.0 * v.coeffs()[2];
    let st = renorm_coeffs_n(&v, alpha, 64).unwrap().sigma_tilde;
    assert!(st < sigma);
    assert_eq!(a.kappa.signum(), (slope * (st - sigma)).signum());
    assert!(matches!(
        kappa_fit(&MicroPotential::new(vec![0.0, 0.0, 1.0]).unwrap(), alpha, &[8, 16, 32]),
        Err(UniversalityError::NotCritical(_))
    ));
    assert!(kappa_fit(&v, alpha, &[8, 16]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn averaging_routes_agree(c in proptest::collection::vec(-2.0f64..2.0, 3..6), lead in 0.1f64..2.0, s in 0.05f64..3.0, z in -2.0f64..2.0) {
        let mut a = c;
        a.push(lead);
        let v = MicroPotential::new(a).unwrap();
        let abar = averaged_coeffs(&v, s);
        let moment = poly(&abar, z);
        let quad = v.averaged_by_quadrature(z, s, 8);
        let trap = averaged_trapezoid(&v, z, s);
        let scale = 1.0 + averaged_trapezoid(&MicroPotential::new(v.coeffs().iter().map(|x| x.abs()).collect()).unwrap(), z.abs(), s);
        prop_assert!((moment - quad).abs() < 1e-10 * scale, "{} vs {}", moment, quad);
        prop_assert!((moment - trap).abs() < 1e-10 * scale, "{} vs {}", moment, trap);
    }

    #[test]
    fn zero_variance_keeps_coefficients(c in proptest::collection::vec(-5.0f64..5.0, 3..7)) {
        let mut a = c;
        if *a.last().unwrap() == 0.0 { *a.last_mut().unwrap() = 1.0; }
        let v = MicroPotential::new(a.clone()).unwrap();
        prop_assert_eq!(averaged_coeffs(&v, 0.0), a);
    }
}
