//! Exhaustive counts of lattice points (and tuples) whose dispersive phase lies
//! within distance 1 of a target, compared with their dyadic bounds.
//!
//! With [[n]] = sqrt(<n>^{2 alpha} - 1/4), the shells are |n| ~ N, meaning
//! N/2 < |n| <= N for N >= 2 and the ball |n| <= 1 for N = 1. The supremum over
//! the target zeta is taken on a grid covering the attainable phases.

use field_core::bracket_symbol;
use field_core::lattice::norm2;
use thiserror::Error;

pub mod sweep;

pub use sweep::{ratio_trend, rejects, SweepRow};

#[derive(Debug, Error, PartialEq)]
pub enum CountingError {
    #[error("scale {0} is not a power of two")]
    NotDyadic(usize),
    #[error("alpha = {0} outside the admissible range")]
    BadAlpha(f64),
    #[error("shift {a:?} is not in the shell of scale {scale}")]
    ShiftNotInShell { a: [i32; 3], scale: usize },
    #[error("enumeration budget exceeded: scale {0} > 4")]
    BudgetExceeded(usize),
    #[error("invalid query: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CountingError>;

/// Whether |n| ~ scale.
pub fn in_shell(n: [i32; 3], scale: usize) -> bool {
    let r2 = norm2(n);
    let s = scale as i64;
    if scale == 1 {
        r2 <= 1
    } else {
        4 * r2 > s * s && r2 <= s * s
    }
}

/// All n with |n| ~ scale.
pub fn shell(scale: usize) -> Vec<[i32; 3]> {
    let s = scale as i32;
    let mut out = Vec::new();
    for a in -s..=s {
        for b in -s..=s {
            for c in -s..=s {
                if in_shell([a, b, c], scale) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn check_dyadic(s: usize) -> Result<()> {
    if s >= 1 && s.is_power_of_two() {
        Ok(())
    } else {
        Err(CountingError::NotDyadic(s))
    }
}

fn check_alpha(alpha: f64, hi: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= hi {
        Ok(())
    } else {
        Err(CountingError::BadAlpha(alpha))
    }
}

fn add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub observed_sup_count: u64,
    /// A target at which the supremum is attained.
    pub zeta: f64,
    pub bound_value: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumReport {
    pub observed_sup: f64,
    pub zeta: f64,
    pub bound_value: f64,
    pub ratio: f64,
}

/// Target grid and window for the supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaGrid {
    pub step: f64,
    /// Half-width of the window |phase - zeta| <= width.
    pub width: f64,
}

impl Default for ZetaGrid {
    fn default() -> Self {
        Self { step: 0.5, width: 1.0 }
    }
}

/// max over zeta on the grid of the total weight of phases within the window.
/// `items` are (phase, weight) pairs.
fn sup_window(mut items: Vec<(f64, f64)>, grid: ZetaGrid) -> (f64, f64) {
    if items.is_empty() {
        return (0.0, 0.0);
    }
    items.sort_by(|x, y| x.0.total_cmp(&y.0));
    let phases: Vec<f64> = items.iter().map(|p| p.0).collect();
    let mut prefix = Vec::with_capacity(items.len() + 1);
    prefix.push(0.0);
    for (_, w) in &items {
        prefix.push(prefix.last().unwrap() + w);
    }
    let (lo, hi) = (phases[0] - grid.width, phases[phases.len() - 1] + grid.width);
    let start = (lo / grid.step).floor() as i64;
    let end = (hi / grid.step).ceil() as i64;
    let mut best = (0.0, start as f64 * grid.step);
    for k in start..=end {
        let z = k as f64 * grid.step;
        let i = phases.partition_point(|&p| p < z - grid.width);
        let j = phases.partition_point(|&p| p <= z + grid.width);
        let w = prefix[j] - prefix[i];
        if w > best.0 {
            best = (w, z);
        }
    }
    best
}

/// Number of phases within the window at a fixed target.
fn count_at(phases: &[f64], zeta: f64, width: f64) -> u64 {
    phases.iter().filter(|&&p| (p - zeta).abs() <= width).count() as u64
}

/// Phases [[a + n]] + sign [[n]] over |n| ~ N (and |n + a| ~ B when given).
fn basic_phases(alpha: f64, n_scale: usize, a: [i32; 3], sign: i32, b_scale: Option<usize>) -> Vec<f64> {
    shell(n_scale)
        .into_iter()
        .filter(|&n| b_scale.map_or(true, |b| in_shell(add(n, a), b)))
        .map(|n| bracket_symbol(add(a, n), alpha) + sign as f64 * bracket_symbol(n, alpha))
        .collect()
}

fn check_basic(alpha: f64, n_scale: usize, a_scale: usize, a: [i32; 3], sign: i32) -> Result<()> {
    check_alpha(alpha, 2.0)?;
    check_dyadic(n_scale)?;
    check_dyadic(a_scale)?;
    if a != [0, 0, 0] && !in_shell(a, a_scale) {
        return Err(CountingError::ShiftNotInShell { a, scale: a_scale });
    }
    if sign != 1 && sign != -1 {
        return Err(CountingError::Invalid(format!("sign must be +-1, got {sign}")));
    }
    Ok(())
}

fn report(items: Vec<(f64, f64)>, grid: ZetaGrid, bound: f64) -> BoundReport {
    let (c, z) = sup_window(items, grid);
    BoundReport { observed_sup_count: c as u64, zeta: z, bound_value: bound, ratio: c / bound }
}

/// sup_zeta #{|n| ~ N : |[[a + n]] + sign [[n]] - zeta| <= 1} against min(A, N)^{-1} N^3.
pub fn count_basic(alpha: f64, n_scale: usize, a_scale: usize, a: [i32; 3], sign: i32, grid: ZetaGrid) -> Result<BoundReport> {
    check_basic(alpha, n_scale, a_scale, a, sign)?;
    let items = basic_phases(alpha, n_scale, a, sign, None).into_iter().map(|p| (p, 1.0)).collect();
    let nf = n_scale as f64;
    Ok(report(items, grid, nf.powi(3) / a_scale.min(n_scale) as f64))
}

/// The basic count at one fixed target zeta.
pub fn count_basic_at(alpha: f64, n_scale: usize, a: [i32; 3], sign: i32, zeta: f64, width: f64) -> u64 {
    count_at(&basic_phases(alpha, n_scale, a, sign, None), zeta, width)
}

/// As `count_basic` with the extra constraint |n + a| ~ B, against
/// min(A, B, N)^{-1} min(B, N)^3.
pub fn count_two_balls(
    alpha: f64,
    n_scale: usize,
    a_scale: usize,
    b_scale: usize,
    a: [i32; 3],
    sign: i32,
    grid: ZetaGrid,
) -> Result<BoundReport> {
    check_basic(alpha, n_scale, a_scale, a, sign)?;
    check_dyadic(b_scale)?;
    let items = basic_phases(alpha, n_scale, a, sign, Some(b_scale)).into_iter().map(|p| (p, 1.0)).collect();
    let m = b_scale.min(n_scale) as f64;
    Ok(report(items, grid, m.powi(3) / a_scale.min(b_scale).min(n_scale) as f64))
}

/// Signs (eps_sum, eps_1, eps_2, eps_3) of the cubic phase
/// eps_sum [[n_1 + n_2 + n_3]] + sum_j eps_j [[n_j]].
pub type Signs3 = [i32; 4];

fn check_k3(alpha: f64, scales: [usize; 3], signs: Signs3, alpha_max: f64) -> Result<()> {
    check_alpha(alpha, alpha_max)?;
    for &s in &scales {
        check_dyadic(s)?;
        if s > 4 {
            return Err(CountingError::BudgetExceeded(s));
        }
    }
    if signs.iter().any(|&e| e != 1 && e != -1) {
        return Err(CountingError::Invalid(format!("signs must be +-1, got {signs:?}")));
    }
    Ok(())
}

/// f(|n|^2) tabulated for |n|^2 <= max_r2.
fn radial_table(max_r2: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..=max_r2).map(|r2| f(r2 as f64)).collect()
}

fn bracket_table(alpha: f64, max_r2: usize) -> Vec<f64> {
    radial_table(max_r2, |r2| ((1.0 + r2).powf(alpha) - 0.25).sqrt())
}

/// Visits (phase, weight) over all triples in the shells; the weight is
/// `shell_w(|n_j|^2)` multiplied over j times `sum_w(|n_1 + n_2 + n_3|^2)`.
fn triples(
    alpha: f64,
    scales: [usize; 3],
    signs: Signs3,
    shell_w: impl Fn(f64) -> f64,
    sum_w: impl Fn(f64) -> f64,
    mut visit: impl FnMut(f64, f64),
) {
    let smax: usize = scales.iter().sum();
    let max_r2 = 3 * smax * smax;
    let br = bracket_table(alpha, max_r2);
    let sw = radial_table(max_r2, sum_w);
    let e = signs.map(|x| x as f64);
    let sh: Vec<Vec<([i32; 3], f64, f64)>> = scales
        .iter()
        .map(|&s| {
            shell(s)
                .into_iter()
                .map(|n| {
                    let r2 = norm2(n) as usize;
                    (n, br[r2], shell_w(r2 as f64))
                })
                .collect()
        })
        .collect();
    for &(n1, b1, w1) in &sh[0] {
        for &(n2, b2, w2) in &sh[1] {
            let n12 = add(n1, n2);
            let p12 = e[1] * b1 + e[2] * b2;
            let w12 = w1 * w2;
            for &(n3, b3, w3) in &sh[2] {
                let r2 = norm2(add(n12, n3)) as usize;
                visit(e[0] * br[r2] + p12 + e[3] * b3, w12 * w3 * sw[r2]);
            }
        }
    }
}

fn max2(scales: [usize; 3]) -> usize {
    let mut v = scales;
    v.sort_unstable();
    v[1]
}

/// sup_zeta #{(n_1, n_2, n_3) : |n_j| ~ N_j, |kappa - zeta| <= 1} against
/// max_(2)(N_j)^{-1} prod N_j^3.
pub fn count_phase_k3(alpha: f64, scales: [usize; 3], signs: Signs3, grid: ZetaGrid) -> Result<BoundReport> {
    check_k3(alpha, scales, signs, 2.0)?;
    let mut items = Vec::new();
    triples(alpha, scales, signs, |_| 1.0, |_| 1.0, |p, w| items.push((p, w)));
    let prod: f64 = scales.iter().map(|&s| (s as f64).powi(3)).product();
    Ok(report(items, grid, prod / max2(scales) as f64))
}

/// The triple count at one fixed target zeta.
pub fn count_phase_k3_at(alpha: f64, scales: [usize; 3], signs: Signs3, zeta: f64, width: f64) -> u64 {
    let mut c = 0;
    triples(alpha, scales, signs, |_| 1.0, |_| 1.0, |p, _| c += ((p - zeta).abs() <= width) as u64);
    c
}

/// sup_zeta of sum prod_j [[n_j]]^{-2} <n_1 + n_2 + n_3>^{2(s - alpha)} 1{|kappa - zeta| <= 1}
/// over the shells, against N_max^{2s - 6 alpha + 6}.
pub fn weighted_sum_k3(alpha: f64, s: f64, scales: [usize; 3], signs: Signs3, grid: ZetaGrid) -> Result<SumReport> {
    check_k3(alpha, scales, signs, 1.5)?;
    if s < alpha - 1.0 {
        return Err(CountingError::Invalid(format!("s = {s} < alpha - 1")));
    }
    let mut items = Vec::new();
    triples(
        alpha,
        scales,
        signs,
        |r2| 1.0 / ((1.0 + r2).powf(alpha) - 0.25),
        |r2| (1.0 + r2).powf(s - alpha),
        |p, w| items.push((p, w)),
    );
    let (v, z) = sup_window(items, grid);
    let nmax = *scales.iter().max().unwrap() as f64;
    let bound = nmax.powf(2.0 * s - 6.0 * alpha + 6.0);
    Ok(SumReport { observed_sup: v, zeta: z, bound_value: bound, ratio: v / bound })
}
