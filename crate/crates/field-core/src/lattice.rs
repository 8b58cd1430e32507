//! Frequency lattice {n in Z^3 : |n| <= N} and the symbols attached to it.
//!
//! Modes are stored in a fixed order: lexicographic over (n1, n2, n3), each
//! component running through the wrap-around sequence 0, 1, ..., N, -N, ..., -1,
//! with n1 varying slowest, keeping only |n|^2 <= N^2. Both n and -n are stored.
//! The checkpoint format relies on this order.

use crate::error::{FieldError, Result};

/// Japanese bracket <n> = (1 + |n|^2)^{1/2}.
#[inline]
pub fn japanese(n: [i32; 3]) -> f64 {
    (1.0 + norm2(n) as f64).sqrt()
}

#[inline]
pub fn norm2(n: [i32; 3]) -> i64 {
    n.iter().map(|&c| (c as i64) * (c as i64)).sum()
}

/// Damped-wave frequency sqrt(<n>^{2 alpha} - 1/4).
pub fn bracket_symbol(n: [i32; 3], alpha: f64) -> f64 {
    ((1.0 + norm2(n) as f64).powf(alpha) - 0.25).sqrt()
}

/// Smallest integer >= m whose only prime factors are 2, 3 and 5.
pub fn fft_friendly(m: usize) -> usize {
    let mut k = m.max(1);
    loop {
        let mut r = k;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}

/// Wrap-around sequence 0, 1, ..., n, -n, ..., -1.
pub fn wrap_order(n: i32) -> impl Iterator<Item = i32> {
    (0..=n).chain(-n..0)
}

#[derive(Debug, Clone)]
pub struct Lattice {
    alpha: f64,
    trunc_n: usize,
    grid_m: usize,
    modes: Vec<[i32; 3]>,
    // (2N+1)^3 cube, entry -1 outside the ball
    lookup: Vec<i64>,
    conj: Vec<usize>,
    weight: Vec<f64>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.alpha.to_bits() == other.alpha.to_bits()
            && self.trunc_n == other.trunc_n
            && self.grid_m == other.grid_m
    }
}

impl Lattice {
    /// Lattice with the default grid: the smallest FFT-friendly M >= 4N+1.
    pub fn new(alpha: f64, trunc_n: usize) -> Result<Self> {
        Self::with_grid(alpha, trunc_n, fft_friendly(4 * trunc_n + 1))
    }

    /// Lattice whose grid is large enough for a degree-`degree` nonlinearity
    /// projected back onto |n| <= N, i.e. M >= (degree + 1) N + 1.
    pub fn for_degree(alpha: f64, trunc_n: usize, degree: usize) -> Result<Self> {
        let need = ((degree + 1) * trunc_n + 1).max(4 * trunc_n + 1);
        Self::with_grid(alpha, trunc_n, fft_friendly(need))
    }

    pub fn with_grid(alpha: f64, trunc_n: usize, grid_m: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FieldError::InvalidLattice(format!("alpha must be positive, got {alpha}")));
        }
        if trunc_n == 0 || trunc_n > 512 {
            return Err(FieldError::InvalidLattice(format!("cutoff N must be in 1..=512, got {trunc_n}")));
        }
        if grid_m < 4 * trunc_n + 1 {
            return Err(FieldError::GridTooSmall { need: 4 * trunc_n + 1, have: grid_m });
        }
        let n = trunc_n as i32;
        let side = 2 * trunc_n + 1;
        let mut modes = Vec::new();
        let mut lookup = vec![-1i64; side * side * side];
        let r2 = (n as i64) * (n as i64);
        for a in wrap_order(n) {
            for b in wrap_order(n) {
                for c in wrap_order(n) {
                    let m = [a, b, c];
                    if norm2(m) <= r2 {
                        lookup[cube_index(m, n)] = modes.len() as i64;
                        modes.push(m);
                    }
                }
            }
        }
        let conj = modes
            .iter()
            .map(|m| lookup[cube_index([-m[0], -m[1], -m[2]], n)] as usize)
            .collect();
        let weight = modes.iter().map(|&m| japanese(m).powf(-2.0 * alpha)).collect();
        Ok(Self { alpha, trunc_n, grid_m, modes, lookup, conj, weight })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn trunc_n(&self) -> usize {
        self.trunc_n
    }

    pub fn grid_m(&self) -> usize {
        self.grid_m
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[i32; 3]] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> [i32; 3] {
        self.modes[i]
    }

    /// Storage index of n, or None when |n| > N.
    pub fn index_of(&self, m: [i32; 3]) -> Option<usize> {
        let n = self.trunc_n as i32;
        if m.iter().any(|c| c.abs() > n) {
            return None;
        }
        let v = self.lookup[cube_index(m, n)];
        (v >= 0).then_some(v as usize)
    }

    /// Storage index of -n for the mode stored at i.
    pub fn conj_index(&self, i: usize) -> usize {
        self.conj[i]
    }

    /// True for one member of every pair {n, -n} with n != 0: the first nonzero
    /// component is positive.
    pub fn is_representative(&self, i: usize) -> bool {
        let m = self.modes[i];
        match m.iter().find(|&&c| c != 0) {
            Some(&c) => c > 0,
            None => false,
        }
    }

    /// <n>^{-2 alpha} for the mode stored at i.
    pub fn weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn bracket(&self, i: usize) -> f64 {
        bracket_symbol(self.modes[i], self.alpha)
    }

    /// Same alpha and grid rules, different cutoff.
    pub fn with_cutoff(&self, trunc_n: usize) -> Result<Self> {
        Self::new(self.alpha, trunc_n)
    }
}

fn cube_index(m: [i32; 3], n: i32) -> usize {
    let side = (2 * n + 1) as usize;
    let f = |c: i32| (c + n) as usize;
    (f(m[0]) * side + f(m[1])) * side + f(m[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        assert_eq!(Lattice::new(1.5, 1).unwrap().len(), 7);
        assert_eq!(Lattice::new(1.5, 2).unwrap().len(), 33);
    }

    #[test]
    fn first_modes_follow_wrap_order() {
        let lat = Lattice::new(1.2, 1).unwrap();
        let got: Vec<_> = lat.modes().to_vec();
        assert_eq!(
            got,
            vec![[0, 0, 0], [0, 0, 1], [0, 0, -1], [0, 1, 0], [0, -1, 0], [1, 0, 0], [-1, 0, 0]]
        );
    }

    #[test]
    fn conj_is_involution() {
        let lat = Lattice::new(1.2, 3).unwrap();
        for i in 0..lat.len() {
            assert_eq!(lat.conj_index(lat.conj_index(i)), i);
            let m = lat.mode(i);
            assert_eq!(lat.mode(lat.conj_index(i)), [-m[0], -m[1], -m[2]]);
        }
        let reps = (0..lat.len()).filter(|&i| lat.is_representative(i)).count();
        assert_eq!(2 * reps + 1, lat.len());
    }

    #[test]
    fn friendly_sizes() {
        assert_eq!(fft_friendly(17), 18);
        assert_eq!(fft_friendly(33), 36);
        assert_eq!(fft_friendly(7), 8);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(matches!(Lattice::with_grid(1.2, 2, 8), Err(FieldError::GridTooSmall { .. })));
    }
}
