use counting::sweep::*;
use counting::*;
use proptest::prelude::*;

const ALPHA: f64 = 1.25;

fn brute_basic(alpha: f64, n: usize, a: [i32; 3], sign: i32, zeta: f64, width: f64) -> u64 {
    // independent enumeration over the bounding box
    let s = n as i32;
    let mut c = 0;
    for x in -s..=s {
        for y in -s..=s {
            for z in -s..=s {
                let m = [x, y, z];
                let r2 = (x * x + y * y + z * z) as f64;
                let inside = if n == 1 { r2 <= 1.0 } else { r2.sqrt() > n as f64 / 2.0 && r2.sqrt() <= n as f64 };
                if !inside {
                    continue;
                }
                let b = |v: [i32; 3]| {
                    let q = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) as f64;
                    ((1.0 + q).powf(alpha) - 0.25).sqrt()
                };
                let p = b([a[0] + x, a[1] + y, a[2] + z]) + sign as f64 * b(m);
                if (p - zeta).abs() <= width {
                    c += 1;
                }
            }
        }
    }
    c
}

#[test]
fn unit_ball_with_zero_shift() {
    let r = count_basic(ALPHA, 1, 1, [0, 0, 0], -1, ZetaGrid::default()).unwrap();
    assert_eq!(r.observed_sup_count, 7);
    assert_eq!(count_basic_at(ALPHA, 1, [0, 0, 0], -1, 0.0, 1.0), 7);
    assert_eq!(shell(1).len(), 7);
    for n in [2usize, 4, 8] {
        assert_eq!(count_basic_at(ALPHA, n, [0, 0, 0], -1, 0.0, 1.0), shell(n).len() as u64);
    }
}

#[test]
fn shells_partition_the_ball() {
    let total: usize = [1usize, 2, 4, 8].iter().map(|&s| shell(s).len()).sum();
    let ball = (-8i32..=8)
        .flat_map(|x| (-8i32..=8).flat_map(move |y| (-8i32..=8).map(move |z| x * x + y * y + z * z)))
        .filter(|&r2| r2 <= 64)
        .count();
    assert_eq!(total, ball);
}

#[test]
fn basic_count_matches_brute_force() {
    for (n, a, sign, zeta) in [(4usize, [3, 1, 0], 1, 30.0), (4, [3, 1, 0], -1, 2.0), (8, [-2, 0, 1], -1, 0.5), (2, [1, 1, 1], 1, 7.0)] {
        assert_eq!(count_basic_at(ALPHA, n, a, sign, zeta, 1.0), brute_basic(ALPHA, n, a, sign, zeta, 1.0));
    }
}

#[test]
fn sup_is_attained_at_reported_target() {
    let g = ZetaGrid::default();
    let r = count_basic(ALPHA, 8, 4, [3, 2, 0], -1, g).unwrap();
    assert_eq!(count_basic_at(ALPHA, 8, [3, 2, 0], -1, r.zeta, 1.0), r.observed_sup_count);
    for k in -40..=200 {
        assert!(count_basic_at(ALPHA, 8, [3, 2, 0], -1, 0.5 * k as f64, 1.0) <= r.observed_sup_count);
    }
    let t = count_phase_k3(ALPHA, [2, 1, 2], [1, -1, 1, -1], g).unwrap();
    assert_eq!(count_phase_k3_at(ALPHA, [2, 1, 2], [1, -1, 1, -1], t.zeta, 1.0), t.observed_sup_count);
}

#[test]
fn two_balls_empty_far_away_and_below_basic() {
    let g = ZetaGrid::default();
    let r = count_two_balls(ALPHA, 2, 2, 32, [2, 0, 0], 1, g).unwrap();
    assert_eq!(r.observed_sup_count, 0);
    for (n, a_s, b) in [(4usize, 4usize, 4usize), (8, 2, 8), (4, 8, 8), (8, 8, 2)] {
        for a in representative_shifts(a_s, 3) {
            for sign in [1, -1] {
                let two = count_two_balls(ALPHA, n, a_s, b, a, sign, g).unwrap();
                let one = count_basic(ALPHA, n, a_s, a, sign, g).unwrap();
                assert!(two.observed_sup_count <= one.observed_sup_count);
            }
        }
    }
}

#[test]
fn far_target_gives_nothing() {
    let signs = [1, 1, 1, 1];
    assert_eq!(count_phase_k3_at(ALPHA, [2, 2, 2], signs, 1e4, 1.0), 0);
    assert_eq!(count_basic_at(ALPHA, 4, [1, 0, 0], 1, -50.0, 1.0), 0);
}

#[test]
fn triple_count_permutation_symmetry() {
    let g = ZetaGrid::default();
    let scales = [1usize, 2, 4];
    let signs = [1, 1, -1, 1];
    let base = count_phase_k3_at(ALPHA, scales, signs, 3.0, 1.0);
    for p in [[0usize, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let sc = [scales[p[0]], scales[p[1]], scales[p[2]]];
        let sg = [signs[0], signs[1 + p[0]], signs[1 + p[1]], signs[1 + p[2]]];
        assert_eq!(count_phase_k3_at(ALPHA, sc, sg, 3.0, 1.0), base);
        assert_eq!(
            count_phase_k3(ALPHA, sc, sg, g).unwrap().observed_sup_count,
            count_phase_k3(ALPHA, scales, signs, g).unwrap().observed_sup_count
        );
    }
}

#[test]
fn reflection_symmetry() {
    // flipping every sign negates the phase
    for zeta in [-4.0, -1.5, 0.0, 2.5, 6.0] {
        assert_eq!(
            count_phase_k3_at(ALPHA, [2, 2, 1], [1, -1, 1, 1], zeta, 1.0),
            count_phase_k3_at(ALPHA, [2, 2, 1], [-1, 1, -1, -1], -zeta, 1.0)
        );
    }
    // n -> -n with a -> -a leaves the basic phase unchanged
    assert_eq!(count_basic_at(ALPHA, 8, [3, -1, 2], -1, 1.0, 1.0), count_basic_at(ALPHA, 8, [-3, 1, -2], -1, 1.0, 1.0));
}

#[test]
fn relaxed_window_is_monotone() {
    for zeta in [-2.0, 0.0, 3.5, 10.0] {
        assert!(count_phase_k3_at(ALPHA, [2, 1, 2], [1, -1, -1, 1], zeta, 2.0) >= count_phase_k3_at(ALPHA, [2, 1, 2], [1, -1, -1, 1], zeta, 1.0));
    }
    let g1 = ZetaGrid { step: 0.5, width: 1.0 };
    let g2 = ZetaGrid { step: 0.5, width: 2.0 };
    let a = count_basic(ALPHA, 16, 4, [4, 0, 0], 1, g1).unwrap();
    let b = count_basic(ALPHA, 16, 4, [4, 0, 0], 1, g2).unwrap();
    assert!(b.observed_sup_count >= a.observed_sup_count);
}

#[test]
fn grid_halving_keeps_the_constant() {
    let scales = [1usize, 2, 4, 8, 16];
    let c1 = max_ratio(&sweep_basic(ALPHA, &scales, 2, ZetaGrid { step: 0.5, width: 1.0 }).unwrap());
    let c2 = max_ratio(&sweep_basic(ALPHA, &scales, 2, ZetaGrid { step: 0.25, width: 1.0 }).unwrap());
    assert!((c2 / c1 - 1.0).abs() <= 0.2, "{c1} vs {c2}");
    let k1 = max_ratio(&sweep_phase_k3(ALPHA, &[1, 2], ZetaGrid { step: 0.5, width: 1.0 }).unwrap());
    let k2 = max_ratio(&sweep_phase_k3(ALPHA, &[1, 2], ZetaGrid { step: 0.25, width: 1.0 }).unwrap());
    assert!((k2 / k1 - 1.0).abs() <= 0.2, "{k1} vs {k2}");
}

#[test]
fn weighted_sum_properties() {
    let g = ZetaGrid::default();
    let r = weighted_sum_k3(ALPHA, ALPHA - 1.0, [1, 2, 1], [1, -1, 1, -1], g).unwrap();
    assert!(r.observed_sup > 0.0);
    // unit balls, no phase constraint: the full sum is an upper bound
    let full: f64 = {
        let b = |n: [i32; 3]| {
            let q = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64;
            (1.0 + q).powf(ALPHA) - 0.25
        };
        let mut t = 0.0;
        for n1 in shell(1) {
            for n2 in shell(2) {
                for n3 in shell(1) {
                    let s = [n1[0] + n2[0] + n3[0], n1[1] + n2[1] + n3[1], n1[2] + n2[2] + n3[2]];
                    let js = 1.0 + (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) as f64;
                    t += js.powf(ALPHA - 1.0 - ALPHA) / (b(n1) * b(n2) * b(n3));
                }
            }
        }
        t
    };
    assert!(r.observed_sup <= full * (1.0 + 1e-12));
    let wide = weighted_sum_k3(ALPHA, ALPHA - 1.0, [1, 2, 1], [1, -1, 1, -1], ZetaGrid { step: 0.5, width: 1e3 }).unwrap();
    assert!((wide.observed_sup - full).abs() < 1e-10 * full);
    assert!(matches!(weighted_sum_k3(ALPHA, 0.1, [1, 1, 1], [1; 4], g), Err(CountingError::Invalid(_))));
}

#[test]
fn invalid_queries() {
    let g = ZetaGrid::default();
    assert_eq!(count_phase_k3(ALPHA, [8, 1, 1], [1; 4], g), Err(CountingError::BudgetExceeded(8)));
    assert_eq!(count_basic(ALPHA, 3, 1, [1, 0, 0], 1, g), Err(CountingError::NotDyadic(3)));
    assert_eq!(count_basic(1.0, 2, 1, [1, 0, 0], 1, g), Err(CountingError::BadAlpha(1.0)));
    assert_eq!(count_basic(ALPHA, 2, 4, [1, 0, 0], 1, g), Err(CountingError::ShiftNotInShell { a: [1, 0, 0], scale: 4 }));
    assert!(matches!(weighted_sum_k3(1.6, 1.0, [1, 1, 1], [1; 4], g), Err(CountingError::BadAlpha(_))));
}

#[test]
fn weakened_bound_is_rejected() {
    let rows = sweep_basic(ALPHA, &[1, 2, 4, 8, 16, 32], 3, ZetaGrid::default()).unwrap();
    assert!(!rejects(&rows, 4, 0.0, 0.25));
    assert!(rejects(&rows, 4, 0.5, 0.25));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn counts_are_bounded_by_shell_size(n_exp in 0u32..4, a_exp in 0u32..4, idx in 0usize..1000, sign in prop::sample::select(vec![1, -1]), zeta in -20.0f64..60.0) {
        let (n, a_s) = (1usize << n_exp, 1usize << a_exp);
        let sh = shell(a_s);
        let a = sh[idx % sh.len()];
        let c = count_basic_at(ALPHA, n, a, sign, zeta, 1.0);
        prop_assert!(c <= shell(n).len() as u64);
        prop_assert!(count_basic_at(ALPHA, n, a, sign, zeta, 2.0) >= c);
        prop_assert_eq!(c, brute_basic(ALPHA, n, a, sign, zeta, 1.0));
    }
}
