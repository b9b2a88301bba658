//! Uniform grids on the torus `T^d = (R / 2πZ)^d`, `d ∈ {1, 2}`, and the
//! discrete Fourier transforms between grid values and truncated coefficients.
//!
//! Coefficients live on the symmetric mode set `|j_i| <= N_ax/2 - 1`; the
//! unpaired Nyquist row of the FFT is never stored, so `j -> -j` is an exact
//! bijection of the mode set.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer frequency. For `d = 1` the second component is always zero.
pub type Mode = [i64; 2];

/// Real frequency vector (half-integer lattice for Weyl midpoints).
pub type Xi = [f64; 2];

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Euclidean length of an integer frequency.
pub fn mode_norm(j: Mode) -> f64 {
    ((j[0] * j[0] + j[1] * j[1]) as f64).sqrt()
}

/// `⟨j⟩ = max(1, |j|)`.
pub fn bracket(j: Mode) -> f64 {
    mode_norm(j).max(1.0)
}

pub fn xi_norm(xi: Xi) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
}

/// `⟨ξ⟩ = max(1, |ξ|)`.
pub fn xi_bracket(xi: Xi) -> f64 {
    xi_norm(xi).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n_ax: usize,
}

impl fmt::Display for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T^{}[N_ax={}]", self.dim, self.n_ax)
    }
}

impl TorusGrid {
    pub fn new(dim: usize, n_ax: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if n_ax < 4 || !n_ax.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n_ax}"
            )));
        }
        Ok(Self { dim, n_ax })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_ax(&self) -> usize {
        self.n_ax
    }

    /// Largest stored frequency per axis, `N_ax/2 - 1`.
    pub fn kmax(&self) -> i64 {
        (self.n_ax / 2 - 1) as i64
    }

    /// Stored modes per axis (`2 kmax + 1`).
    pub fn modes_per_axis(&self) -> usize {
        self.n_ax - 1
    }

    pub fn num_modes(&self) -> usize {
        self.modes_per_axis().pow(self.dim as u32)
    }

    pub fn num_points(&self) -> usize {
        self.n_ax.pow(self.dim as u32)
    }

    /// Mode for a linear coefficient index (lexicographic order).
    pub fn mode(&self, idx: usize) -> Mode {
        let m = self.modes_per_axis();
        let k = self.kmax();
        match self.dim {
            1 => [idx as i64 - k, 0],
            _ => [(idx / m) as i64 - k, (idx % m) as i64 - k],
        }
    }

    pub fn mode_index(&self, j: Mode) -> Option<usize> {
        let k = self.kmax();
        let m = self.modes_per_axis() as i64;
        if j[0].abs() > k {
            return None;
        }
        match self.dim {
            1 => (j[1] == 0).then(|| (j[0] + k) as usize),
            _ => {
                if j[1].abs() > k {
                    None
                } else {
                    Some(((j[0] + k) * m + (j[1] + k)) as usize)
                }
            }
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.num_modes()).map(move |i| self.mode(i))
    }

    /// Index of the zero mode.
    pub fn zero_index(&self) -> usize {
        self.mode_index([0, 0]).expect("zero mode always stored")
    }

    /// Index of `-j` for the mode at `idx`.
    pub fn neg_index(&self, idx: usize) -> usize {
        self.num_modes() - 1 - idx
    }

    /// Coordinates of a grid point (row-major over axes).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = 2.0 * PI / self.n_ax as f64;
        match self.dim {
            1 => [idx as f64 * h, 0.0],
            _ => [(idx / self.n_ax) as f64 * h, (idx % self.n_ax) as f64 * h],
        }
    }

    /// Grid index of the point `-x` (mod 2π).
    pub fn reflected_point(&self, idx: usize) -> usize {
        let n = self.n_ax;
        let r = |i: usize| (n - i) % n;
        match self.dim {
            1 => r(idx),
            _ => r(idx / n) * n + r(idx % n),
        }
    }

    /// Points per axis of the 3/2-padded grid used for dealiased products.
    pub fn padded_n_ax(&self) -> usize {
        let m = (3 * self.n_ax).div_ceil(2);
        m + m % 2
    }

    /// Grid values (length `num_points`) to mode-set coefficients.
    pub fn forward(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.forward_on(self.n_ax, values)
    }

    /// Mode-set coefficients to grid values.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.inverse_on(self.n_ax, coeffs)
    }

    /// Transform values sampled on an `m`-point-per-axis grid (`m >= N_ax`),
    /// keeping only mode-set coefficients.
    pub fn forward_on(&self, m: usize, values: &[Complex64]) -> Result<Vec<Complex64>> {
        let len = m.pow(self.dim as u32);
        if values.len() != len {
            return Err(Error::SizeMismatch {
                expected: len,
                found: values.len(),
            });
        }
        let mut buf = values.to_vec();
        fft_nd(&mut buf, m, self.dim, false);
        let scale = 1.0 / len as f64;
        Ok((0..self.num_modes())
            .map(|i| buf[wrap_index(self.mode(i), m, self.dim)] * scale)
            .collect())
    }

    /// Evaluate mode-set coefficients on an `m`-point-per-axis grid (`m >= N_ax`).
    pub fn inverse_on(&self, m: usize, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.num_modes() {
            return Err(Error::SizeMismatch {
                expected: self.num_modes(),
                found: coeffs.len(),
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(self.dim as u32)];
        for (i, c) in coeffs.iter().enumerate() {
            buf[wrap_index(self.mode(i), m, self.dim)] = *c;
        }
        fft_nd(&mut buf, m, self.dim, true);
        Ok(buf)
    }
}

fn wrap_index(j: Mode, m: usize, dim: usize) -> usize {
    let w = |v: i64| v.rem_euclid(m as i64) as usize;
    match dim {
        1 => w(j[0]),
        _ => w(j[0]) * m + w(j[1]),
    }
}

/// Unnormalized in-place FFT over a row-major `m^dim` array.
fn fft_nd(buf: &mut [Complex64], m: usize, dim: usize, inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(m)
        } else {
            p.plan_fft_forward(m)
        }
    });
    // rows are contiguous in both layouts
    fft.process(buf);
    if dim == 2 {
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for c in 0..m {
            for r in 0..m {
                col[r] = buf[r * m + c];
            }
            fft.process(&mut col);
            for r in 0..m {
                buf[r * m + c] = col[r];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_indexing_round_trips() {
        for &(d, n) in &[(1, 8), (2, 8)] {
            let g = TorusGrid::new(d, n).unwrap();
            for i in 0..g.num_modes() {
                assert_eq!(g.mode_index(g.mode(i)), Some(i));
                let j = g.mode(i);
                let neg = g.mode(g.neg_index(i));
                assert_eq!(neg, [-j[0], -j[1]]);
            }
            assert_eq!(g.mode(g.zero_index()), [0, 0]);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::new(3, 8).is_err());
        assert!(TorusGrid::new(1, 7).is_err());
        assert!(TorusGrid::new(1, 2).is_err());
    }

    #[test]
    fn constant_and_cosine() {
        let g = TorusGrid::new(1, 16).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        let c = g.forward(&ones).unwrap();
        for (i, v) in c.iter().enumerate() {
            let expect = if i == g.zero_index() { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-15);
        }
        let cos: Vec<_> = (0..16)
            .map(|i| Complex64::new(g.point(i)[0].cos(), 0.0))
            .collect();
        let c = g.forward(&cos).unwrap();
        let p1 = g.mode_index([1, 0]).unwrap();
        let m1 = g.mode_index([-1, 0]).unwrap();
        for (i, v) in c.iter().enumerate() {
            let expect = if i == p1 || i == m1 { 0.5 } else { 0.0 };
            assert!((v - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn size_mismatch_is_reported() {
        let g = TorusGrid::new(1, 8).unwrap();
        assert!(matches!(
            g.forward(&[Complex64::new(0.0, 0.0); 5]),
            Err(Error::SizeMismatch { expected: 8, found: 5 })
        ));
        assert!(g.inverse(&[Complex64::new(0.0, 0.0); 8]).is_err());
    }

    #[test]
    fn reflection_maps_x_to_minus_x() {
        let g = TorusGrid::new(2, 8).unwrap();
        for i in 0..g.num_points() {
            let x = g.point(i);
            let y = g.point(g.reflected_point(i));
            for a in 0..2 {
                let s = (x[a] + y[a]).rem_euclid(2.0 * PI);
                assert!(s < 1e-12 || (2.0 * PI - s) < 1e-12);
            }
        }
    }
}
