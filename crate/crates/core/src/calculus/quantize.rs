//! Bony–Weyl, Weyl and standard quantization of symbols into `ParaOp`s.
//!
//! Weyl-type assembly loops over the sums `s = j + k`: every entry with the
//! same `s` shares the frequency `ξ = s/2`, so one `â(·, s/2)` serves the
//! whole anti-diagonal. Standard assembly loops over columns `k` instead.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::cutoff::CutoffParams;
use super::operator::{BlockOp, ParaOp};
use super::symbol::{MatrixSymbol, Symbol, Term};
use crate::error::{Error, Result};
use crate::grid::{bracket, mode_norm, Mode, TorusGrid};

type Triplet = (usize, usize, Complex64);

/// All sums `s = j + k` with `j, k` in the mode set.
fn sum_set(grid: TorusGrid) -> Vec<Mode> {
    let k2 = 2 * grid.kmax();
    match grid.dim() {
        1 => (-k2..=k2).map(|s| [s, 0]).collect(),
        _ => (-k2..=k2)
            .flat_map(|a| (-k2..=k2).map(move |b| [a, b]))
            .collect(),
    }
}

/// Differences `n = j - k` compatible with `s` (same parity, both ends in the
/// mode set), restricted to `|n_i| <= cap`.
fn differences(grid: TorusGrid, s: Mode, cap: i64) -> Vec<Mode> {
    let k2 = 2 * grid.kmax();
    let axis = |si: i64| -> Vec<i64> {
        let lim = (k2 - si.abs()).min(cap);
        (-lim..=lim).filter(|n| (n - si).rem_euclid(2) == 0).collect()
    };
    match grid.dim() {
        1 => axis(s[0]).into_iter().map(|n| [n, 0]).collect(),
        _ => {
            let a = axis(s[0]);
            let b = axis(s[1]);
            a.iter().flat_map(|&x| b.iter().map(move |&y| [x, y])).collect()
        }
    }
}

/// Precomputed sparsity pattern of a Weyl-type quantization: for every
/// stored entry, the row, column, mode index of `n = j - k`, index of
/// `s = j + k` in the sum set, and cutoff weight. Entries are sorted by
/// `(row, col)`.
#[derive(Debug)]
pub struct Stencil {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    n_idx: Vec<usize>,
    s_idx: Vec<usize>,
    weight: Vec<f64>,
    sums: Vec<Mode>,
}

type StencilKey = (TorusGrid, Option<u64>);

fn stencil_cache() -> &'static Mutex<HashMap<StencilKey, Arc<Stencil>>> {
    static CACHE: OnceLock<Mutex<HashMap<StencilKey, Arc<Stencil>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Stencil {
    /// Cached stencil for `Op^BW` (`cutoff = Some`) or `Op^W` (`None`).
    pub fn get(grid: TorusGrid, cutoff: Option<CutoffParams>) -> Arc<Stencil> {
        let key = (grid, cutoff.map(|c| c.eps().to_bits()));
        if let Some(s) = stencil_cache().lock().expect("stencil cache").get(&key) {
            return s.clone();
        }
        let built = Arc::new(Self::build(grid, cutoff));
        stencil_cache()
            .lock()
            .expect("stencil cache")
            .entry(key)
            .or_insert(built)
            .clone()
    }

    fn build(grid: TorusGrid, cutoff: Option<CutoffParams>) -> Self {
        let sums = sum_set(grid);
        let mut entries: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
        for (si, &s) in sums.iter().enumerate() {
            let bs = bracket(s);
            let cap = match cutoff {
                Some(c) => (c.support_radius() * bs).floor() as i64,
                None => i64::MAX,
            };
            for n in differences(grid, s, cap) {
                let Some(ni) = grid.mode_index(n) else { continue };
                let w = match cutoff {
                    Some(c) => c.chi_eps_radial(mode_norm(n) / bs),
                    None => 1.0,
                };
                if w == 0.0 {
                    continue;
                }
                let j = [(s[0] + n[0]) / 2, (s[1] + n[1]) / 2];
                let k = [(s[0] - n[0]) / 2, (s[1] - n[1]) / 2];
                let r = grid.mode_index(j).expect("j in mode set");
                let c = grid.mode_index(k).expect("k in mode set");
                entries.push((r, c, ni, si, w));
            }
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; grid.num_modes() + 1];
        for e in &entries {
            row_ptr[e.0 + 1] += 1;
        }
        for r in 0..grid.num_modes() {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            row_ptr,
            cols: entries.iter().map(|e| e.1).collect(),
            n_idx: entries.iter().map(|e| e.2).collect(),
            s_idx: entries.iter().map(|e| e.3).collect(),
            weight: entries.iter().map(|e| e.4).collect(),
            sums,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Assembles a separable symbol `Σ_t c_t(x) m_t(ξ)`.
    fn assemble_separable(&self, a: &Symbol, terms: &[Term], band: Option<f64>) -> Result<ParaOp> {
        let grid = a.grid();
        let tables: Vec<Vec<Complex64>> = terms
            .iter()
            .map(|t| {
                self.sums
                    .iter()
                    .map(|s| t.multiplier().eval([0.5 * s[0] as f64, 0.5 * s[1] as f64]))
                    .collect()
            })
            .collect();
        for tab in &tables {
            if let Some(i) = tab.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                let s = self.sums[i];
                return Err(Error::SymbolEvaluation {
                    x: grid.point(0),
                    xi: [0.5 * s[0] as f64, 0.5 * s[1] as f64],
                });
            }
        }
        let vals: Vec<Complex64> = (0..self.nnz())
            .map(|e| {
                let (n, s) = (self.n_idx[e], self.s_idx[e]);
                let v: Complex64 = terms
                    .iter()
                    .zip(&tables)
                    .map(|(t, tab)| t.coeff().coeffs()[n] * tab[s])
                    .sum();
                v * self.weight[e]
            })
            .collect();
        Ok(ParaOp::from_csr(
            grid,
            a.order(),
            band,
            self.row_ptr.clone(),
            self.cols.clone(),
            vals,
        ))
    }
}

fn weyl_like(a: &Symbol, cutoff: Option<CutoffParams>) -> Result<ParaOp> {
    let grid = a.grid();
    let band = cutoff.map(|c| c.support_radius());
    if a.is_x_independent() {
        return diagonal_path(a, band);
    }
    if let Some(terms) = a.terms() {
        return Stencil::get(grid, cutoff).assemble_separable(a, terms, band);
    }
    let chunks: Vec<Result<Vec<Triplet>>> = sum_set(grid)
        .into_par_iter()
        .map(|s| {
            let bs = bracket(s);
            let cap = match cutoff {
                Some(c) => (c.support_radius() * bs).floor() as i64,
                None => i64::MAX,
            };
            let mut ns = Vec::new();
            let mut ws = Vec::new();
            for n in differences(grid, s, cap) {
                let w = match cutoff {
                    Some(c) => c.chi_eps_radial(mode_norm(n) / bs),
                    None => 1.0,
                };
                if w != 0.0 {
                    ns.push(n);
                    ws.push(w);
                }
            }
            if ns.is_empty() {
                return Ok(Vec::new());
            }
            let xi = [0.5 * s[0] as f64, 0.5 * s[1] as f64];
            let h = a.hat_at(xi, &ns)?;
            Ok(ns
                .iter()
                .zip(ws)
                .zip(h)
                .map(|((n, w), v)| {
                    let j = [(s[0] + n[0]) / 2, (s[1] + n[1]) / 2];
                    let k = [(s[0] - n[0]) / 2, (s[1] - n[1]) / 2];
                    (
                        grid.mode_index(j).expect("j in mode set"),
                        grid.mode_index(k).expect("k in mode set"),
                        v * w,
                    )
                })
                .collect())
        })
        .collect();
    let mut triplets = Vec::new();
    for c in chunks {
        triplets.extend(c?);
    }
    Ok(ParaOp::from_triplets(grid, a.order(), band, triplets))
}

/// `x`-independent symbols: `M[j, j] = a(j)`.
fn diagonal_path(a: &Symbol, band: Option<f64>) -> Result<ParaOp> {
    let grid = a.grid();
    let diag: Result<Vec<Complex64>> = grid
        .modes()
        .map(|j| Ok(a.hat_at([j[0] as f64, j[1] as f64], &[[0, 0]])?[0]))
        .collect();
    let t = diag?.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect();
    Ok(ParaOp::from_triplets(grid, a.order(), band.or(Some(0.0)), t))
}

/// `Op^BW(a)`: `M[j,k] = â(j-k, (j+k)/2) χ_ε((j-k)/⟨j+k⟩)`.
pub fn assemble_bony_weyl(a: &Symbol, cutoff: CutoffParams) -> Result<ParaOp> {
    weyl_like(a, Some(cutoff))
}

/// `Op^W(a)`: `M[j,k] = â(j-k, (j+k)/2)`.
pub fn assemble_weyl(a: &Symbol) -> Result<ParaOp> {
    weyl_like(a, None)
}

/// `Op(b)`: `M[j,k] = b̂(j-k, k)`.
pub fn assemble_standard(b: &Symbol) -> Result<ParaOp> {
    let grid = b.grid();
    if b.is_x_independent() {
        return diagonal_path(b, None);
    }
    let modes: Vec<Mode> = grid.modes().collect();
    let chunks: Vec<Result<Vec<Triplet>>> = (0..grid.num_modes())
        .into_par_iter()
        .map(|col| {
            let k = modes[col];
            let ns: Vec<Mode> = modes.iter().map(|j| [j[0] - k[0], j[1] - k[1]]).collect();
            let h = b.hat_at([k[0] as f64, k[1] as f64], &ns)?;
            Ok(h.into_iter().enumerate().map(|(row, v)| (row, col, v)).collect())
        })
        .collect();
    let mut triplets = Vec::new();
    for c in chunks {
        triplets.extend(c?);
    }
    Ok(ParaOp::from_triplets(grid, b.order(), None, triplets))
}

/// Entrywise Bony–Weyl quantization of a matrix symbol.
pub fn assemble_bony_weyl_matrix(a: &MatrixSymbol, cutoff: CutoffParams) -> Result<BlockOp> {
    let mut blocks: [[Option<ParaOp>; 2]; 2] = Default::default();
    for r in 0..2 {
        for c in 0..2 {
            if let Some(s) = &a.entries[r][c] {
                blocks[r][c] = Some(assemble_bony_weyl(s, cutoff)?);
            }
        }
    }
    Ok(BlockOp { blocks })
}
