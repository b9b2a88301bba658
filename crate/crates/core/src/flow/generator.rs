//! Generators of the linear flows.

use std::sync::Arc;

use num_complex::Complex64;

use crate::calculus::{assemble_bony_weyl_matrix, chi, BlockOp, CutoffParams, MatrixSymbol, Regularity, Symbol};
use crate::ek::paralin::{coefficient_fields, full_symbol};
use crate::ek::{diag_frame, generator, EKParams, StateU};
use crate::error::Result;

/// `𝕁 Op^BW((A₂ + A₁) χ(ε λ(x) |ξ|²))`, or the plain `𝕁 Op^BW(A₂ + A₁)`
/// when `flow_eps` is `None`.
pub fn mollified_generator(
    v: &StateU,
    p: &EKParams,
    flow_eps: Option<f64>,
    cutoff: CutoffParams,
) -> Result<BlockOp> {
    let Some(eps) = flow_eps else {
        return generator(v, p, cutoff);
    };
    let c = coefficient_fields(v, p)?;
    let lambda: Arc<Vec<f64>> = Arc::new(diag_frame(v, p)?.lambda_vals);
    let grid = v.grid();
    let moll = Symbol::from_slab(
        grid,
        0.0,
        Regularity::Holder(2.0),
        move |xi| {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            Ok(lambda
                .iter()
                .map(|l| Complex64::new(chi([eps * l * r2, 0.0]), 0.0))
                .collect())
        },
        None,
    );
    let a = full_symbol(&c, p)?;
    let mut entries: [[Option<Symbol>; 2]; 2] = Default::default();
    for (r, row) in a.entries.iter().enumerate() {
        for (col, e) in row.iter().enumerate() {
            if let Some(e) = e {
                entries[r][col] = Some(e.mul(&moll)?);
            }
        }
    }
    let mut op = assemble_bony_weyl_matrix(&MatrixSymbol { entries }, cutoff)?;
    for (r, s) in [(0, Complex64::new(0.0, -1.0)), (1, Complex64::new(0.0, 1.0))] {
        for b in op.blocks[r].iter_mut().flatten() {
            *b = b.scale(s);
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::cutoff::chi_radial;
    use crate::ek::{to_complex, CapillarityLaw, PotentialLaw, StateRP};
    use crate::field::{FieldFlags, FourierField};
    use crate::grid::TorusGrid;

    fn params() -> EKParams {
        EKParams::new(
            1.0,
            CapillarityLaw::Polynomial {
                coeffs: vec![1.0, 0.0, 0.5],
            },
            PotentialLaw::Linear { c: 1.0 },
            0.3,
            3.0,
            0.05,
        )
        .unwrap()
    }

    fn state(g: TorusGrid, p: &EKParams) -> StateU {
        let s = StateRP::new(
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 0.3 * x[0].cos() + 0.1 * (2.0 * x[0]).sin()),
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 0.2 * x[0].sin()),
        )
        .unwrap();
        to_complex(&s, p).unwrap()
    }

    fn max_diff(a: &BlockOp, b: &BlockOp, n: usize) -> f64 {
        let (x, y) = (a.to_dense(n), b.to_dense(n));
        x.iter()
            .flatten()
            .zip(y.iter().flatten())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rest_state_is_a_cut_multiplier() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let eps = 0.01;
        let op = mollified_generator(&StateU::zeros(g), &p, Some(eps), CutoffParams::default()).unwrap();
        let n = g.num_modes();
        let d = op.to_dense(n);
        let w = p.dispersion();
        for r in 0..2 * n {
            for c in 0..2 * n {
                let j = g.mode(r % n);
                let k2 = (j[0] * j[0]) as f64;
                let expect = if r == c {
                    let s = if r < n { -1.0 } else { 1.0 };
                    Complex64::new(0.0, s * w * k2 * chi_radial(eps * k2))
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((d[r][c] - expect).norm() < 1e-12 * (1.0 + k2), "({r},{c})");
            }
        }
    }

    #[test]
    fn plateau_agrees_with_plain_generator() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let v = state(g, &p);
        let plain = mollified_generator(&v, &p, None, CutoffParams::default()).unwrap();
        // ε λ_max |ξ|² stays below 1.1 on the lattice
        let lmax = diag_frame(&v, &p).unwrap().lambda_vals.into_iter().fold(0.0, f64::max);
        let eps = 1.0 / (lmax * 15.5f64.powi(2));
        let moll = mollified_generator(&v, &p, Some(eps), CutoffParams::default()).unwrap();
        assert!(max_diff(&plain, &moll, g.num_modes()) < 1e-11);
    }

    #[test]
    fn large_eps_annihilates_high_modes() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let v = state(g, &p);
        let eps = 1e3;
        let op = mollified_generator(&v, &p, Some(eps), CutoffParams::default()).unwrap();
        let n = g.num_modes();
        let d = op.to_dense(n);
        // ξ = (j + k)/2 with |ξ| >= 1/2 is cut once ε λ_min/4 >= 1.9
        let largest = d.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(largest < 1e-12);
    }
}
