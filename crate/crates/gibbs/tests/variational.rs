use std::sync::Arc;

use field_core::{Complex64, Lattice, RngStream};
use gibbs::*;
use wick::WickTable;

fn lattice(alpha: f64, n: usize) -> Arc<Lattice> {
    Arc::new(Lattice::new(alpha, n).unwrap())
}

#[test]
fn zero_potential_optimum_is_zero_drift() {
    let lat = lattice(1.3, 2);
    let cfg = BdConfig { paths: 16, iterations: 20, eval_paths: 100, ..Default::default() };
    let res = boue_dupuis_minimize(&Potential::Zero, &lat, Control::open_loop(&lat, 4), &cfg, &RngStream::new(1, 0)).unwrap();
    assert_eq!(res.objective, 0.0);
    assert!(res.control.open.values.iter().all(|v| v.mean_square() == 0.0));
}

#[test]
fn linear_potential_reaches_completed_square() {
    let c = 1.5;
    let lat = lattice(1.3, 2);
    let cfg = BdConfig { paths: 32, iterations: 400, learning_rate: 0.05, eval_paths: 4000, ..Default::default() };
    let pot = Potential::ZeroModeLinear(c);
    let res = boue_dupuis_minimize(&pot, &lat, Control::open_loop(&lat, 8), &cfg, &RngStream::new(2, 0)).unwrap();
    let exact = -0.5 * c * c;
    assert!((res.objective - exact).abs() < 0.05 * exact.abs(), "{} vs {exact}", res.objective);
    for v in &res.control.open.values {
        assert!((v.coeffs()[0].re + c).abs() < 0.05);
    }
}

#[test]
fn adjoint_gradient_matches_finite_differences() {
    let (alpha, n) = (1.3, 1);
    let lat = lattice(alpha, n);
    let table = WickTable::new(alpha, n);
    let pot = Potential::wick(&table);
    let knots = 3;
    let mut ctl = Control::with_feedback(&lat, knots);
    let mut r = RngStream::new(5, 5);
    for v in &mut ctl.open.values {
        *v = field_core::sample_gaussian(&lat, &mut r).scaled(0.5);
    }
    for g in ctl.gains.as_mut().unwrap() {
        for x in g.iter_mut() {
            *x = 0.5 + r.uniform();
        }
    }
    let rng = RngStream::new(6, 0);
    let (j0, grad) = objective_gradient(&pot, &lat, &ctl, 8, &rng).unwrap();
    assert!(j0.is_finite());
    let len = lat.len();
    let eps = 1e-5;
    // zero mode, a representative pair (real and imaginary parts), and gains
    let rep = (1..len).find(|&i| lat.is_representative(i)).unwrap();
    let partner = lat.conj_index(rep);
    for k in 0..knots {
        let mut p = ctl.clone();
        p.open.values[k].coeffs_mut()[0] += Complex64::new(eps, 0.0);
        let mut m = ctl.clone();
        m.open.values[k].coeffs_mut()[0] -= Complex64::new(eps, 0.0);
        let fd = (objective_gradient(&pot, &lat, &p, 8, &rng).unwrap().0
            - objective_gradient(&pot, &lat, &m, 8, &rng).unwrap().0)
            / (2.0 * eps);
        let ad = grad[2 * (k * len)];
        assert!((fd - ad).abs() < 1e-5 * (1.0 + fd.abs()), "zero mode k={k}: {fd} vs {ad}");

        for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let shift = |c: &Control, s: f64| {
                let mut c = c.clone();
                c.open.values[k].coeffs_mut()[rep] += dir * s;
                c.open.values[k].coeffs_mut()[partner] += dir.conj() * s;
                objective_gradient(&pot, &lat, &c, 8, &rng).unwrap().0
            };
            let fd = (shift(&ctl, eps) - shift(&ctl, -eps)) / (2.0 * eps);
            let g = |i: usize| Complex64::new(grad[2 * (k * len + i)], grad[2 * (k * len + i) + 1]);
            let ad = (g(rep).conj() * dir).re + (g(partner).conj() * dir.conj()).re;
            assert!((fd - ad).abs() < 1e-5 * (1.0 + fd.abs()), "pair k={k}: {fd} vs {ad}");
        }
    }
    let ns = shells(&lat).0.len();
    for k in 0..knots {
        for s in 0..ns {
            let shift = |d: f64| {
                let mut c = ctl.clone();
                c.gains.as_mut().unwrap()[k][s] += d;
                objective_gradient(&pot, &lat, &c, 8, &rng).unwrap().0
            };
            let fd = (shift(eps) - shift(-eps)) / (2.0 * eps);
            let ad = grad[2 * knots * len + k * ns + s];
            assert!((fd - ad).abs() < 1e-5 * (1.0 + fd.abs()), "gain k={k} s={s}: {fd} vs {ad}");
        }
    }
}

#[test]
fn objective_is_an_upper_bound_on_minus_log_z() {
    let (alpha, n) = (1.3, 2);
    let lat = lattice(alpha, n);
    let table = WickTable::full(alpha, n).unwrap();
    let pot = Potential::wick(&table);
    let fit = fit_gaussian(&pot, &lat);
    let is = estimate_logz_importance(&pot, &lat, &Proposal::Fitted(fit.clone()), 20_000, &RngStream::new(3, 0)).unwrap();
    let cfg = BdConfig { paths: 64, iterations: 30, eval_paths: 2000, ..Default::default() };
    let res = boue_dupuis_minimize(&pot, &lat, Control::from_gaussian_fit(&fit, 64), &cfg, &RngStream::new(4, 0)).unwrap();
    let comb = (res.stderr.powi(2) + is.stderr.powi(2)).sqrt();
    assert!(res.objective > -is.log_z - 3.0 * comb, "objective {} vs -log Z {}", res.objective, -is.log_z);
    // and much better than the trivial open-loop value alpha_N
    assert!(res.objective < table.alpha_n.unwrap());
    assert_eq!(res.history.len(), 30);
    assert_eq!(res.mean_drift.values.len(), 64);
}

#[test]
fn mismatched_controls_rejected() {
    let lat = lattice(1.3, 2);
    let mut ctl = Control::with_feedback(&lat, 4);
    ctl.gains.as_mut().unwrap().pop();
    let r = boue_dupuis_minimize(&Potential::Zero, &lat, ctl, &BdConfig::default(), &RngStream::new(1, 0));
    assert!(matches!(r, Err(GibbsError::GridMismatch(_))));
    let mut ctl = Control::open_loop(&lat, 4);
    ctl.open.values.pop();
    let r = boue_dupuis_minimize(&Potential::Zero, &lat, ctl, &BdConfig::default(), &RngStream::new(1, 0));
    assert!(matches!(r, Err(GibbsError::GridMismatch(_))));
}

#[test]
fn divergent_objective_reported() {
    let lat = lattice(1.3, 1);
    let cfg = BdConfig { paths: 4, iterations: 2, eval_paths: 4, ..Default::default() };
    let r = boue_dupuis_minimize(&Potential::Constant(f64::NAN), &lat, Control::open_loop(&lat, 2), &cfg, &RngStream::new(1, 0));
    assert!(matches!(r, Err(GibbsError::Divergent { iteration: 0, .. })));
}
