//! Symbolic composition, change of quantization, and numerical probes of
//! the composition and continuity theorems.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cutoff::CutoffParams;
use super::quantize::assemble_bony_weyl;
use super::symbol::{Regularity, Symbol};
use crate::error::{Error, Result};
use crate::field::FieldFlags;
use crate::grid::{xi_bracket, Xi};
use crate::norms::sobolev_norm;
use crate::sampling::random_field;

/// `a #_ρ b`: the product for `ρ <= 1`, plus `(1/2i){a, b}` for `ρ ∈ (1, 2]`,
/// with `{a, b} = ∇_ξ a · ∇_x b − ∇_x a · ∇_ξ b`.
///
/// The bracket needs one `x`-derivative of each symbol; a symbol whose
/// regularity tag guarantees less than that (and that actually depends on
/// `x`) yields a capability error.
pub fn compose_symbol(a: &Symbol, b: &Symbol, rho: f64) -> Result<Symbol> {
    if !(rho > 0.0 && rho <= 2.0) {
        return Err(Error::Parameter(format!("composition order ρ = {rho} outside (0, 2]")));
    }
    let prod = a.mul(b)?;
    if rho <= 1.0 {
        return Ok(prod);
    }
    let dim = a.grid().dim();
    for (name, s) in [("left", a), ("right", b)] {
        if !s.is_x_independent() && s.regularity().x_smoothness(dim) < 1.0 {
            return Err(Error::Capability(format!(
                "{name} symbol has regularity {:?}; the Poisson bracket needs one x-derivative",
                s.regularity()
            )));
        }
    }
    let pb = poisson_bracket(a, b)?;
    prod.add(&pb.scale(Complex64::new(0.0, -0.5)))
}

/// `{a, b} = Σ_r ∂_{ξ_r}a ∂_{x_r}b − ∂_{x_r}a ∂_{ξ_r}b`.
pub fn poisson_bracket(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    let mut acc: Option<Symbol> = None;
    for r in 0..a.grid().dim() {
        let t = a
            .xi_partial(r)
            .mul(&b.x_partial(r))?
            .sub(&a.x_partial(r).mul(&b.xi_partial(r))?)?;
        acc = Some(match acc {
            Some(s) => s.add(&t)?,
            None => t,
        });
    }
    Ok(acc.expect("dimension is at least one"))
}

/// Standard-quantization symbol `b` with `b̂(n, ξ) = â(n, ξ + n/2)`, so that
/// `Op^W(a) = Op(b)`.
pub fn weyl_to_standard(a: &Symbol) -> Symbol {
    let grid = a.grid();
    let src = a.clone();
    Symbol::from_coefficients(grid, a.order(), a.regularity(), move |xi| {
        grid.modes()
            .map(|n| {
                let shifted = [xi[0] + 0.5 * n[0] as f64, xi[1] + 0.5 * n[1] as f64];
                Ok(src.hat_at(shifted, &[n])?[0])
            })
            .collect()
    })
}

/// Output of [`composition_remainder_probe`].
#[derive(Clone, Debug, Serialize)]
pub struct RemainderProbe {
    pub levels: Vec<u32>,
    /// `‖R u_k‖_0` for unit-normalized `u_k = Δ_k(random)`.
    pub norms: Vec<f64>,
    /// Least-squares slope of `log2 ‖R u_k‖_0` against `k`; `-∞` when `R`
    /// vanishes on every probe.
    pub slope: f64,
}

/// Largest frequency reached when a level-`k` block passes through two
/// Bony–Weyl operators.
pub fn probe_reach(level: u32, cutoff: CutoffParams) -> f64 {
    let e = cutoff.eps();
    1.9 * 2f64.powi(level as i32) * ((1.0 + e) / (1.0 - e)).powi(2)
}

/// Measures the decay of `R = Op^BW(a)Op^BW(b) − Op^BW(a #_ρ b)` on dyadic
/// probes.
pub fn composition_remainder_probe(
    a: &Symbol,
    b: &Symbol,
    rho: f64,
    levels: &[u32],
    cutoff: CutoffParams,
    seed: u64,
) -> Result<RemainderProbe> {
    let grid = a.grid();
    for &k in levels {
        let needed = probe_reach(k, cutoff);
        if needed > grid.kmax() as f64 {
            return Err(Error::InsufficientResolution {
                level: k,
                needed,
                available: grid.kmax(),
            });
        }
    }
    let ab = compose_symbol(a, b, rho)?;
    let op_a = assemble_bony_weyl(a, cutoff)?;
    let op_b = assemble_bony_weyl(b, cutoff)?;
    let op_ab = assemble_bony_weyl(&ab, cutoff)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut norms = Vec::with_capacity(levels.len());
    for &k in levels {
        let raw = random_field(&mut rng, grid, 0.0, FieldFlags::COMPLEX).lp_block(k);
        let uk = raw.scale(1.0 / sobolev_norm(&raw, 0.0));
        let r = op_a.apply(&op_b.apply(&uk)?)?.sub(&op_ab.apply(&uk)?)?;
        norms.push(sobolev_norm(&r, 0.0));
    }
    let slope = if norms.iter().all(|&n| n == 0.0) {
        f64::NEG_INFINITY
    } else {
        let xs: Vec<f64> = levels.iter().map(|&k| k as f64).collect();
        let ys: Vec<f64> = norms.iter().map(|n| n.max(f64::MIN_POSITIVE).log2()).collect();
        fit_slope(&xs, &ys)
    };
    Ok(RemainderProbe {
        levels: levels.to_vec(),
        norms,
        slope,
    })
}

/// Ordinary least-squares slope.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Frequencies at which seminorms are sampled: the half-integer lattice up
/// to 4 per axis, then `2^k` and `1.5·2^k` up to the grid cutoff (tensor
/// product in `d = 2`).
pub fn seminorm_samples(grid: crate::grid::TorusGrid) -> Vec<Xi> {
    let kmax = grid.kmax() as f64;
    let mut axis: Vec<f64> = (-8..=8).map(|i| 0.5 * i as f64).collect();
    let mut p = 8.0;
    while p <= kmax {
        axis.extend([p, -p]);
        if 1.5 * p <= kmax {
            axis.extend([1.5 * p, -1.5 * p]);
        }
        p *= 2.0;
    }
    axis.extend([kmax, -kmax]);
    axis.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    axis.dedup();
    match grid.dim() {
        1 => axis.iter().map(|&x| [x, 0.0]).collect(),
        _ => axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| [x, y]))
            .collect(),
    }
}

/// `|a|_{m, 𝒲, n} = max_{|β| <= n} sup_ξ ⟨ξ⟩^{-m+|β|} ‖∂_ξ^β a(·, ξ)‖_𝒲`,
/// with `ξ` sampled by [`seminorm_samples`].
pub fn seminorm_estimate(a: &Symbol, m: f64, w: Regularity, n: usize) -> Result<f64> {
    let grid = a.grid();
    let samples = seminorm_samples(grid);
    let mut best: f64 = 0.0;
    // derivatives by multi-index, built incrementally
    let mut layer = vec![a.clone()];
    for order in 0..=n {
        for s in &layer {
            for &xi in &samples {
                let f = s.field_at(xi)?;
                let v = xi_bracket(xi).powf(order as f64 - m) * w.norm(&f);
                best = best.max(v);
            }
        }
        if order == n {
            break;
        }
        // ∂_ξ^β with β sorted: extend only along axes >= the last one used
        layer = if grid.dim() == 1 {
            layer.iter().map(|s| s.xi_partial(0)).collect()
        } else {
            let mut next = Vec::new();
            for (i, s) in layer.iter().enumerate() {
                // layer at `order` holds β = (order - i, i)
                next.push(s.xi_partial(0));
                if i + 1 == layer.len() {
                    next.push(s.xi_partial(1));
                }
            }
            next
        };
    }
    Ok(best)
}
