//! Parameter sweeps over the dyadic scales and the verdict on their ratios.

use crate::{count_basic, count_phase_k3, count_two_balls, shell, weighted_sum_k3, Result, Signs3, ZetaGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lemma: &'static str,
    pub scales: Vec<usize>,
    pub signs: Vec<i32>,
    pub shift: Option<[i32; 3]>,
    pub sup: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl SweepRow {
    /// Ratio against the bound multiplied by N^{-delta} (N the first scale).
    pub fn ratio_weakened(&self, delta: f64) -> f64 {
        self.ratio * (self.scales[0] as f64).powf(delta)
    }
}

/// `k` shell points of scale `a`, evenly spaced in the enumeration order.
pub fn representative_shifts(a: usize, k: usize) -> Vec<[i32; 3]> {
    let sh = shell(a);
    let k = k.clamp(1, sh.len());
    (0..k).map(|i| sh[i * sh.len() / k]).collect()
}

pub fn sweep_basic(alpha: f64, scales: &[usize], shifts_per_scale: usize, grid: ZetaGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in scales {
        for &a_s in scales {
            for a in representative_shifts(a_s, shifts_per_scale) {
                for sign in [1, -1] {
                    let r = count_basic(alpha, n, a_s, a, sign, grid)?;
                    rows.push(SweepRow {
                        lemma: "basic",
                        scales: vec![n, a_s],
                        signs: vec![sign],
                        shift: Some(a),
                        sup: r.observed_sup_count as f64,
                        bound: r.bound_value,
                        ratio: r.ratio,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn sweep_two_balls(alpha: f64, scales: &[usize], shifts_per_scale: usize, grid: ZetaGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in scales {
        for &a_s in scales {
            for &b in scales {
                for a in representative_shifts(a_s, shifts_per_scale) {
                    for sign in [1, -1] {
                        let r = count_two_balls(alpha, n, a_s, b, a, sign, grid)?;
                        rows.push(SweepRow {
                            lemma: "two_balls",
                            scales: vec![n, a_s, b],
                            signs: vec![sign],
                            shift: Some(a),
                            sup: r.observed_sup_count as f64,
                            bound: r.bound_value,
                            ratio: r.ratio,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// The eight sign patterns with eps_sum = +1 (the others are reflections).
pub fn sign_patterns() -> Vec<Signs3> {
    (0..8).map(|m| [1, 1 - 2 * (m & 1), 1 - (m & 2), 1 - ((m & 4) >> 1)]).collect()
}

fn scale_triples(scales: &[usize]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &a in scales {
        for &b in scales {
            for &c in scales {
                out.push([a, b, c]);
            }
        }
    }
    out
}

pub fn sweep_phase_k3(alpha: f64, scales: &[usize], grid: ZetaGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for sc in scale_triples(scales) {
        for signs in sign_patterns() {
            let r = count_phase_k3(alpha, sc, signs, grid)?;
            rows.push(SweepRow {
                lemma: "phase_k3",
                scales: sc.to_vec(),
                signs: signs.to_vec(),
                shift: None,
                sup: r.observed_sup_count as f64,
                bound: r.bound_value,
                ratio: r.ratio,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_weighted_k3(alpha: f64, s: f64, scales: &[usize], grid: ZetaGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for sc in scale_triples(scales) {
        for signs in sign_patterns() {
            let r = weighted_sum_k3(alpha, s, sc, signs, grid)?;
            rows.push(SweepRow {
                lemma: "weighted_k3",
                scales: sc.to_vec(),
                signs: signs.to_vec(),
                shift: None,
                sup: r.observed_sup,
                bound: r.bound_value,
                ratio: r.ratio,
            });
        }
    }
    Ok(rows)
}

pub fn max_ratio(rows: &[SweepRow]) -> f64 {
    rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
}

/// Least-squares slope of log(max ratio at N) against log N, N the first scale,
/// using only N >= n_min. `delta` weakens the bound by N^{-delta}.
pub fn ratio_trend(rows: &[SweepRow], n_min: usize, delta: f64) -> Option<f64> {
    let mut per_n = std::collections::BTreeMap::<usize, f64>::new();
    for r in rows.iter().filter(|r| r.scales[0] >= n_min) {
        let e = per_n.entry(r.scales[0]).or_insert(0.0);
        *e = e.max(r.ratio_weakened(delta));
    }
    let pts: Vec<(f64, f64)> = per_n.iter().filter(|(_, &m)| m > 0.0).map(|(&n, &m)| ((n as f64).ln(), m.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// A bound is rejected when the sup ratio per scale still grows at the top
/// of the range, with log-log slope at least `threshold`.
pub fn rejects(rows: &[SweepRow], n_min: usize, delta: f64, threshold: f64) -> bool {
    ratio_trend(rows, n_min, delta).map_or(false, |s| s >= threshold)
}
