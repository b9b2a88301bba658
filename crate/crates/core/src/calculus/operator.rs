//! Assembled operators over the mode set, stored row-compressed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};
use crate::grid::{bracket, mode_norm, Mode, TorusGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse matrix `M[j, k]` acting on mode-set coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaOp {
    grid: TorusGrid,
    order: f64,
    band: Option<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl ParaOp {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        grid: TorusGrid,
        order: f64,
        band: Option<f64>,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Self {
        let n = grid.num_modes();
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry exists") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut op = Self {
            grid,
            order,
            band,
            row_ptr,
            cols,
            vals,
        };
        op.prune();
        op
    }

    /// Builds from row-compressed arrays whose rows are already sorted by
    /// column; exact zeros are dropped.
    pub fn from_csr(
        grid: TorusGrid,
        order: f64,
        band: Option<f64>,
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), grid.num_modes() + 1);
        debug_assert_eq!(cols.len(), vals.len());
        let mut op = Self {
            grid,
            order,
            band,
            row_ptr,
            cols,
            vals,
        };
        op.prune();
        op
    }

    pub fn diagonal(grid: TorusGrid, order: f64, diag: Vec<Complex64>) -> Self {
        let t = diag.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect();
        Self::from_triplets(grid, order, Some(0.0), t)
    }

    pub fn identity(grid: TorusGrid) -> Self {
        Self::diagonal(grid, 0.0, vec![Complex64::new(1.0, 0.0); grid.num_modes()])
    }

    fn prune(&mut self) {
        let n = self.grid.num_modes();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..n {
            for e in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[e] != ZERO {
                    cols.push(self.cols[e]);
                    vals.push(self.vals[e]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// Declared bound on `|j - k| / ⟨j + k⟩` for nonzero entries.
    pub fn band(&self) -> Option<f64> {
        self.band
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.grid.num_modes()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |e| (r, self.cols[e], self.vals[e]))
        })
    }

    pub fn entry(&self, j: Mode, k: Mode) -> Complex64 {
        let (Some(r), Some(c)) = (self.grid.mode_index(j), self.grid.mode_index(k)) else {
            return ZERO;
        };
        let row = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(p) => self.vals[self.row_ptr[r] + p],
            Err(_) => ZERO,
        }
    }

    pub fn apply_coeffs(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.grid.num_modes();
        if u.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: u.len(),
            });
        }
        Ok((0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|e| self.vals[e] * u[self.cols[e]])
                    .sum()
            })
            .collect())
    }

    pub fn apply(&self, u: &FourierField) -> Result<FourierField> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: u.grid().to_string(),
            });
        }
        FourierField::from_coeffs(self.grid, self.apply_coeffs(u.coeffs())?, FieldFlags::COMPLEX)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut op = self.clone();
        op.vals.iter_mut().for_each(|v| *v *= s);
        op.prune();
        op
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        let band = match (self.band, other.band) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let t = self.entries().chain(other.entries()).collect();
        Ok(Self::from_triplets(self.grid, self.order.max(other.order), band, t))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.grid.num_modes();
        let mut m = vec![vec![ZERO; n]; n];
        for (r, c, v) in self.entries() {
            m[r][c] = v;
        }
        m
    }

    /// Largest entrywise difference, treating absent entries as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.sub(other) {
            Ok(d) => d.vals.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|M[j,k] - conj(M[k,j])|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.entry(self.grid.mode(c), self.grid.mode(r)).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// Largest `|M[j,k]|` among entries with `|j - k| >= radius·⟨j + k⟩`.
    pub fn off_band_leakage(&self, radius: f64) -> f64 {
        self.entries()
            .filter(|&(r, c, _)| {
                let (j, k) = (self.grid.mode(r), self.grid.mode(c));
                let d = [j[0] - k[0], j[1] - k[1]];
                let s = [j[0] + k[0], j[1] + k[1]];
                mode_norm(d) >= radius * bracket(s)
            })
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `max_r Σ_c |M[r,c]|`, an upper bound for the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.grid.num_modes())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|e| self.vals[e].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// JSON dump `{order_m, band, triplets: [[j, k, re, im], ...]}`; in
    /// `d = 2` the mode entries are two-element arrays.
    pub fn dump_json(&self) -> String {
        let d = self.grid.dim();
        let fmt_mode = |m: Mode| {
            if d == 1 {
                format!("{}", m[0])
            } else {
                format!("[{},{}]", m[0], m[1])
            }
        };
        let band = self.band.map_or("null".to_string(), |b| format!("{:.16e}", b));
        let mut s = format!("{{\"order_m\":{:.16e},\"band\":{},\"triplets\":[", self.order, band);
        for (i, (r, c, v)) in self.entries().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!(
                "[{},{},{:.16e},{:.16e}]",
                fmt_mode(self.grid.mode(r)),
                fmt_mode(self.grid.mode(c)),
                v.re,
                v.im
            ));
        }
        s.push_str("]}");
        s
    }
}

/// A 2×2 block operator acting on pairs `(u, v)` of coefficient vectors.
#[derive(Clone, Debug)]
pub struct BlockOp {
    pub blocks: [[Option<ParaOp>; 2]; 2],
}

impl BlockOp {
    pub fn grid(&self) -> Option<TorusGrid> {
        self.blocks.iter().flatten().flatten().next().map(|b| b.grid())
    }

    pub fn apply(&self, u: &[Complex64], v: &[Complex64]) -> Result<[Vec<Complex64>; 2]> {
        let mut out = [vec![ZERO; u.len()], vec![ZERO; v.len()]];
        for (r, row) in self.blocks.iter().enumerate() {
            for (c, block) in row.iter().enumerate() {
                if let Some(b) = block {
                    let x = b.apply_coeffs(if c == 0 { u } else { v })?;
                    for (o, y) in out[r].iter_mut().zip(x) {
                        *o += y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row-sum bound on the spectral radius of the whole block matrix.
    pub fn radius_bound(&self) -> f64 {
        let n = self.grid().map_or(0, |g| g.num_modes());
        let mut worst: f64 = 0.0;
        for row in &self.blocks {
            let mut sums = vec![0.0f64; n];
            for b in row.iter().flatten() {
                for (r, _, v) in b.entries() {
                    sums[r] += v.norm();
                }
            }
            worst = worst.max(sums.into_iter().fold(0.0, f64::max));
        }
        worst
    }

    /// Dense `2n × 2n` matrix (row-major blocks).
    pub fn to_dense(&self, n: usize) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![ZERO; 2 * n]; 2 * n];
        for (br, row) in self.blocks.iter().enumerate() {
            for (bc, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    for (r, c, v) in b.entries() {
                        m[br * n + r][bc * n + c] = v;
                    }
                }
            }
        }
        m
    }
}
