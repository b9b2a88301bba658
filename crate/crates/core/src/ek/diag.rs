//! Pointwise diagonalization of `𝕁 A₂`.
//!
//! With `a = 1 + ta₊`, `b = ta₋` and `λ² = a² − b²`, the real matrix
//! `F = [[f, g], [g, f]]`, `f = (a + λ)/√((a + λ)² − b²)`,
//! `g = −b/√((a + λ)² − b²)` has unit determinant and satisfies
//! `F⁻¹ 𝕁 [[a, b], [b, a]] F = 𝕁 λ`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use super::paralin::coefficient_fields;
use super::params::EKParams;
use super::state::StateU;
use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};

/// `λ`, `f`, `g` as fields, plus the grid values they were built from.
#[derive(Clone, Debug)]
pub struct DiagFrame {
    pub lambda: FourierField,
    pub f: FourierField,
    pub g_entry: FourierField,
    /// `1 + ta₊` on the grid.
    pub a_vals: Vec<f64>,
    /// `ta₋` on the grid.
    pub b_vals: Vec<f64>,
    pub lambda_vals: Vec<f64>,
    pub f_vals: Vec<f64>,
    pub g_vals: Vec<f64>,
}

fn lambda_vals(rho: &[f64], p: &EKParams) -> Vec<f64> {
    let d = p.m_k(p.mbar());
    rho.iter().map(|r| (p.m_k(p.mbar() + r) / d).sqrt()).collect()
}

/// `λ = √((m̄ + ρ) K(m̄ + ρ) / (m̄ K(m̄)))`.
pub fn lambda_of(v: &StateU, p: &EKParams) -> Result<FourierField> {
    Ok(diag_frame(v, p)?.lambda)
}

pub fn diag_frame(v: &StateU, p: &EKParams) -> Result<DiagFrame> {
    let c = coefficient_fields(v, p)?;
    let grid = v.grid();
    let rho = c.state.rho.real_values();
    // pointwise from ρ: the fields ta± lose their Nyquist content
    let (mbar, kbar) = (p.mbar(), p.kbar());
    let ta = |r: f64, sign: f64| 0.5 * ((p.k(mbar + r) - kbar) / kbar + sign * r / mbar);
    let a_vals: Vec<f64> = rho.iter().map(|&r| 1.0 + ta(r, 1.0)).collect();
    let b_vals: Vec<f64> = rho.iter().map(|&r| ta(r, -1.0)).collect();
    let lam = lambda_vals(&rho, p);
    let mut f_vals = Vec::with_capacity(lam.len());
    let mut g_vals = Vec::with_capacity(lam.len());
    for i in 0..lam.len() {
        let s = a_vals[i] + lam[i];
        let rad = s * s - b_vals[i] * b_vals[i];
        if !(rad > 0.0) || !lam[i].is_finite() {
            return Err(Error::Radicand {
                x: grid.point(i),
                value: rad,
            });
        }
        let q = rad.sqrt();
        f_vals.push(s / q);
        g_vals.push(-b_vals[i] / q);
    }
    let field = |v: &[f64]| FourierField::from_real_values(grid, v, FieldFlags::REAL);
    Ok(DiagFrame {
        lambda: field(&lam)?,
        f: field(&f_vals)?,
        g_entry: field(&g_vals)?,
        a_vals,
        b_vals,
        lambda_vals: lam,
        f_vals,
        g_vals,
    })
}

/// Largest pointwise residuals of the conjugation identity and of
/// `det F = 1`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagResidual {
    pub conjugation: f64,
    pub determinant: f64,
}

pub fn diag_identity_residual(v: &StateU, p: &EKParams) -> Result<DiagResidual> {
    let fr = diag_frame(v, p)?;
    let i = Complex64::new(0.0, 1.0);
    let jm = Matrix2::new(-i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), i);
    let mut out = DiagResidual {
        conjugation: 0.0,
        determinant: 0.0,
    };
    for k in 0..fr.f_vals.len() {
        let (f, g, a, b, l) = (fr.f_vals[k], fr.g_vals[k], fr.a_vals[k], fr.b_vals[k], fr.lambda_vals[k]);
        let c = |x: f64| Complex64::new(x, 0.0);
        let fm = Matrix2::new(c(f), c(g), c(g), c(f));
        let finv = Matrix2::new(c(f), c(-g), c(-g), c(f));
        let am = Matrix2::new(c(a), c(b), c(b), c(a));
        let r = finv * jm * am * fm - jm * c(l);
        out.conjugation = r.iter().map(|z| z.norm()).fold(out.conjugation, f64::max);
        out.determinant = out.determinant.max((f * f - g * g - 1.0).abs());
    }
    Ok(out)
}
