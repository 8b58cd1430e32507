//! Pruned 3-D transforms between band-limited coefficients and an M^3 grid.
//!
//! Grid layout is row-major with the third axis contiguous; frequency c sits at
//! position c mod M along each axis. Only lines that can carry nonzero data are
//! transformed.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::LatticeField;
use crate::lattice::Lattice;

pub struct SpectralGrid {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    data: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("m", &self.m).finish()
    }
}

fn band(m: usize, n: usize) -> Vec<usize> {
    if 2 * n + 1 >= m {
        return (0..m).collect();
    }
    (0..=n).chain(m - n..m).collect()
}

impl SpectralGrid {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            m,
            fwd,
            inv,
            data: vec![Complex64::new(0.0, 0.0); m * m * m],
            buf: Vec::new(),
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Grid values after [`synthesize`](Self::synthesize).
    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    fn pos(&self, c: i32) -> usize {
        c.rem_euclid(self.m as i32) as usize
    }

    /// Transforms lines along `axis` whose other two coordinates lie in the
    /// given position sets (None = all positions).
    fn lines(&mut self, axis: usize, outer: Option<&[usize]>, inner: Option<&[usize]>, inverse: bool) {
        let m = self.m;
        let all: Vec<usize> = (0..m).collect();
        let outer = outer.unwrap_or(&all);
        let inner = inner.unwrap_or(&all);
        let stride = [m * m, m, 1][axis];
        let (so, si) = match axis {
            0 => (m, 1),
            1 => (m * m, 1),
            _ => (m * m, m),
        };
        let plan = if inverse { Arc::clone(&self.inv) } else { Arc::clone(&self.fwd) };
        if axis == 2 {
            for &a in outer {
                for &b in inner {
                    let base = a * so + b * si;
                    plan.process_with_scratch(&mut self.data[base..base + m], &mut self.scratch);
                }
            }
            return;
        }
        // strided axes: one cache-sized block per outer index, gathered row by
        // row so the reads stay contiguous
        let nin = inner.len();
        self.buf.resize(nin * m, Complex64::new(0.0, 0.0));
        for &a in outer {
            for k in 0..m {
                let row = a * so + k * stride;
                for (bi, &b) in inner.iter().enumerate() {
                    self.buf[bi * m + k] = self.data[row + b * si];
                }
            }
            plan.process_with_scratch(&mut self.buf, &mut self.scratch);
            for k in 0..m {
                let row = a * so + k * stride;
                for (bi, &b) in inner.iter().enumerate() {
                    self.data[row + b * si] = self.buf[bi * m + k];
                }
            }
        }
    }

    fn scatter(&mut self, f: &LatticeField, scale: Complex64) {
        let m = self.m;
        let lat = f.lattice();
        for (&n, &z) in lat.modes().iter().zip(f.coeffs()) {
            let g = (self.pos(n[0]) * m + self.pos(n[1])) * m + self.pos(n[2]);
            self.data[g] += scale * z;
        }
    }

    fn synth_lines(&mut self, n: usize) {
        let b = band(self.m, n);
        self.lines(2, Some(&b), Some(&b), true);
        self.lines(1, Some(&b), None, true);
        self.lines(0, None, None, true);
    }

    fn anal_lines(&mut self, n: usize) {
        let b = band(self.m, n);
        self.lines(0, None, None, false);
        self.lines(1, Some(&b), None, false);
        self.lines(2, Some(&b), Some(&b), false);
    }

    /// Fills the grid with u(x_j) = sum_n u^(n) e^{i n.x_j}. Requires M >= 2N+1.
    pub fn synthesize(&mut self, f: &LatticeField) {
        assert!(self.m > 2 * f.lattice().trunc_n(), "grid cannot hold the field band");
        self.data.fill(Complex64::new(0.0, 0.0));
        self.scatter(f, Complex64::new(1.0, 0.0));
        self.synth_lines(f.lattice().trunc_n());
    }

    /// Fills the grid with f(x) + i g(x) for two real fields on one lattice.
    pub fn synthesize_pair(&mut self, f: &LatticeField, g: &LatticeField) {
        assert!(self.m > 2 * f.lattice().trunc_n(), "grid cannot hold the field band");
        self.data.fill(Complex64::new(0.0, 0.0));
        self.scatter(f, Complex64::new(1.0, 0.0));
        self.scatter(g, Complex64::new(0.0, 1.0));
        self.synth_lines(f.lattice().trunc_n().max(g.lattice().trunc_n()));
    }

    fn gather(&self, out: &Arc<Lattice>) -> Vec<Complex64> {
        let m = self.m;
        let norm = 1.0 / (m * m * m) as f64;
        out.modes()
            .iter()
            .map(|&n| norm * self.data[(self.pos(n[0]) * m + self.pos(n[1])) * m + self.pos(n[2])])
            .collect()
    }

    /// Fourier coefficients of the grid data on the modes of `out`.
    /// The grid contents are consumed. The result is not symmetrized.
    pub fn analyze_raw(&mut self, out: &Arc<Lattice>) -> Vec<Complex64> {
        self.anal_lines(out.trunc_n());
        self.gather(out)
    }

    /// Coefficients of the real part of the grid data.
    pub fn analyze(&mut self, out: &Arc<Lattice>) -> LatticeField {
        for z in self.data.iter_mut() {
            z.im = 0.0;
        }
        let c = self.analyze_raw(out);
        let mut f = LatticeField::from_coeffs(out, c).expect("length matches");
        f.symmetrize();
        f
    }

    /// Splits grid data F + iG (F, G real) into the coefficients of F and G.
    pub fn analyze_pair(&mut self, out: &Arc<Lattice>) -> (LatticeField, LatticeField) {
        let z = self.analyze_raw(out);
        let mut a = Vec::with_capacity(z.len());
        let mut b = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            let w = z[out.conj_index(i)].conj();
            a.push(0.5 * (z[i] + w));
            b.push(Complex64::new(0.0, -0.5) * (z[i] - w));
        }
        let mut fa = LatticeField::from_coeffs(out, a).expect("length matches");
        let mut fb = LatticeField::from_coeffs(out, b).expect("length matches");
        fa.symmetrize();
        fb.symmetrize();
        (fa, fb)
    }
}

thread_local! {
    static GRIDS: RefCell<HashMap<usize, SpectralGrid>> = RefCell::new(HashMap::new());
}

/// Runs `op` with this thread's cached grid of size m.
pub fn with_grid<R>(m: usize, op: impl FnOnce(&mut SpectralGrid) -> R) -> R {
    GRIDS.with(|cell| {
        let mut map = cell.borrow_mut();
        let g = map.entry(m).or_insert_with(|| SpectralGrid::new(m));
        op(g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn roundtrip_identity() {
        let lat = Arc::new(Lattice::new(1.2, 3).unwrap());
        let mut f = LatticeField::from_fn(&lat, |n| {
            Complex64::new((n[0] + 2 * n[1]) as f64 * 0.1 + 1.0, 0.3 * n[2] as f64)
        });
        f.symmetrize();
        let mut g = SpectralGrid::new(lat.grid_m());
        g.synthesize(&f);
        let back = g.analyze(&lat);
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pair_split() {
        let lat = Arc::new(Lattice::new(1.2, 2).unwrap());
        let mut f = LatticeField::zeros(&lat);
        f.set_pair([1, 0, 0], Complex64::new(0.5, 0.25));
        let mut h = LatticeField::zeros(&lat);
        h.set_pair([0, 2, 0], Complex64::new(-1.0, 2.0));
        h.set_pair([0, 0, 0], Complex64::new(3.0, 0.0));
        let mut g = SpectralGrid::new(lat.grid_m());
        g.synthesize_pair(&f, &h);
        let (a, b) = g.analyze_pair(&lat);
        for i in 0..lat.len() {
            assert!((a.coeffs()[i] - f.coeffs()[i]).norm() < 1e-13);
            assert!((b.coeffs()[i] - h.coeffs()[i]).norm() < 1e-13);
        }
    }
}
