use std::sync::Arc;

use field_core::stats::mean_se;
use field_core::{Complex64, Lattice, LatticeField, RngStream};
use gibbs::*;
use wick::WickTable;

fn setup(alpha: f64, n: usize) -> (Arc<Lattice>, WickTable) {
    (Arc::new(Lattice::new(alpha, n).unwrap()), WickTable::full(alpha, n).unwrap())
}

/// An adapted test drift: theta_k depends on Y(t_k) only.
fn test_drift(y: &YPath) -> DriftPath {
    let values = y.values[..y.time_knots]
        .iter()
        .map(|yk| {
            let lat = Arc::clone(yk.lattice());
            let mut th = yk.project(1).apply_multiplier(|m| -0.7 * field_core::japanese(m).powf(lat.alpha()));
            th.coeffs_mut()[0] += Complex64::new(0.3, 0.0);
            th
        })
        .collect();
    DriftPath { time_knots: y.time_knots, values }
}

#[test]
fn zero_drift_gives_zdot() {
    let (lat, table) = setup(1.3, 2);
    let y = sample_y_path(&lat, 8, &RngStream::new(1, 0));
    let ups = drift_change_of_variables(&table, &y, &DriftPath::zeros(&lat, 8)).unwrap();
    for k in 0..8 {
        let z = zdot(&table, &y.values[k], k as f64 / 8.0).unwrap();
        assert_eq!(ups.values[k].coeffs(), z.coeffs());
    }
}

#[test]
fn path_variance_grows_linearly() {
    let (lat, _) = setup(1.3, 1);
    let knots = 4;
    let paths: Vec<YPath> = (0..4000).map(|p| sample_y_path(&lat, knots, &RngStream::new(2, p))).collect();
    for k in 1..=knots {
        for i in 0..lat.len() {
            let xs: Vec<f64> = paths.iter().map(|y| y.values[k].coeffs()[i].norm_sqr()).collect();
            let (m, se) = mean_se(&xs);
            let exact = k as f64 / knots as f64 * lat.weight(i);
            assert!((m - exact).abs() < 3.5 * se, "k={k} i={i}: {m} vs {exact}");
        }
    }
}

#[test]
fn zdot_energy_is_alpha_n() {
    for n in [1usize, 2] {
        let (lat, table) = setup(1.3, n);
        let zero = DriftPath::zeros(&lat, 64);
        let xs: Vec<f64> = (0..3000)
            .map(|p| {
                let y = sample_y_path(&lat, 64, &RngStream::new(3, p));
                identity_sides(&table, &y, &zero).unwrap().z_energy
            })
            .collect();
        let (m, se) = mean_se(&xs);
        let a = table.alpha_n.unwrap();
        assert!((m - a).abs() < 3.0 * se, "N={n}: {m} +- {se} vs alpha_N {a}");
    }
}

#[test]
fn shifted_drift_identity() {
    let (lat, table) = setup(1.3, 2);
    let diffs: Vec<f64> = (0..3000)
        .map(|p| {
            let y = sample_y_path(&lat, 64, &RngStream::new(4, p));
            let s = identity_sides(&table, &y, &test_drift(&y)).unwrap();
            s.rhs - s.lhs
        })
        .collect();
    let (m, se) = mean_se(&diffs);
    assert!(m.abs() < 3.0 * se, "mean difference {m} +- {se}");
}

#[test]
fn energy_of_theta_is_h_alpha_energy_of_theta_dot() {
    let (lat, table) = setup(1.3, 2);
    let y = sample_y_path(&lat, 16, &RngStream::new(5, 0));
    let th = test_drift(&y);
    // with z' removed the Upsilon' energy is the drift energy
    let zero_y = YPath { time_knots: 16, values: vec![LatticeField::zeros(&lat); 17] };
    let s = identity_sides(&table.with_sigma(0.0), &zero_y, &th).unwrap();
    assert!((s.rhs + table.alpha_n.unwrap() - th.energy()).abs() < 1e-10 * (1.0 + th.energy()));
}

#[test]
fn grid_mismatch_rejected() {
    let (lat, table) = setup(1.3, 1);
    let y = sample_y_path(&lat, 8, &RngStream::new(1, 0));
    assert!(matches!(
        drift_change_of_variables(&table, &y, &DriftPath::zeros(&lat, 4)),
        Err(GibbsError::GridMismatch(_))
    ));
    assert!(matches!(identity_sides(&table, &y, &DriftPath::zeros(&lat, 16)), Err(GibbsError::GridMismatch(_))));
}
