//! Paralinearization `∂_t U = 𝕁 Op^BW(A₂ + A₁) U + R(U)` with
//! `𝕁 = diag(−i, i)`.

use num_complex::Complex64;

use super::params::EKParams;
use super::rhs::ek_rhs_exact;
use super::state::{check_admissible, from_complex, to_complex, StateRP, StateU};
use crate::calculus::{
    assemble_bony_weyl_matrix, BlockOp, CutoffParams, MatrixSymbol, Multiplier, Regularity, Symbol, Term,
};
use crate::error::Result;
use crate::field::{FieldFlags, FourierField};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);
const PLUS_I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficient functions of `A₂` and `A₁` at a state.
#[derive(Clone, Debug)]
pub struct CoefficientFields {
    pub state: StateRP,
    /// `ta₊`
    pub ta_plus: FourierField,
    /// `ta₋`
    pub ta_minus: FourierField,
    /// `b = ∇φ`, one field per axis.
    pub b: Vec<FourierField>,
}

/// `ta± = ½((K(m̄+ρ) − K(m̄))/K(m̄) ± ρ/m̄)` and `b = ∇φ`, after checking
/// that `m̄ + ρ` stays inside the open density window.
pub fn coefficient_fields(v: &StateU, p: &EKParams) -> Result<CoefficientFields> {
    let state = from_complex(v, p)?;
    check_admissible(&state.rho, p, 0.0)?;
    let (mbar, kbar) = (p.mbar(), p.kbar());
    let ta = |sign: f64| {
        state
            .rho
            .map_real(FieldFlags::REAL, |r| 0.5 * ((p.k(mbar + r) - kbar) / kbar + sign * r / mbar))
    };
    let ta_plus = ta(1.0);
    let ta_minus = ta(-1.0);
    let b = (0..v.grid().dim()).map(|r| state.phi.partial(r)).collect();
    Ok(CoefficientFields {
        state,
        ta_plus,
        ta_minus,
        b,
    })
}

fn a2_from(c: &CoefficientFields, p: &EKParams) -> MatrixSymbol {
    let grid = c.ta_plus.grid();
    let disp = p.dispersion();
    let diag = FourierField::constant(grid, 1.0)
        .add(&c.ta_plus)
        .expect("same grid")
        .scale(disp);
    let off = c.ta_minus.scale(disp);
    let reg = Regularity::Holder(2.0);
    let d = Symbol::product_form(&diag, Multiplier::xi_sq(), 2.0, reg);
    let o = Symbol::product_form(&off, Multiplier::xi_sq(), 2.0, reg);
    MatrixSymbol {
        entries: [[Some(d.clone()), Some(o.clone())], [Some(o), Some(d)]],
    }
}

fn a1_from(c: &CoefficientFields) -> Result<MatrixSymbol> {
    let grid = c.ta_plus.grid();
    let reg = Regularity::Holder(1.0);
    let terms = |sign: f64| -> Vec<Term> {
        c.b.iter()
            .enumerate()
            .map(|(r, b)| Term::new(b.scale(sign), Multiplier::xi_component(r)))
            .collect()
    };
    Ok(MatrixSymbol::diagonal(
        Symbol::separable(grid, 1.0, reg, terms(1.0))?,
        Symbol::separable(grid, 1.0, reg, terms(-1.0))?,
    ))
}

/// `A₂ = √(m̄K(m̄)) |ξ|² [[1 + ta₊, ta₋], [ta₋, 1 + ta₊]]`.
pub fn symbols_a2(v: &StateU, p: &EKParams) -> Result<MatrixSymbol> {
    Ok(a2_from(&coefficient_fields(v, p)?, p))
}

/// `A₁ = diag(b·ξ, −b·ξ)`.
pub fn symbols_a1(v: &StateU, p: &EKParams) -> Result<MatrixSymbol> {
    a1_from(&coefficient_fields(v, p)?)
}

fn j_rows(mut op: BlockOp) -> BlockOp {
    for (r, s) in [(0, MINUS_I), (1, PLUS_I)] {
        for b in op.blocks[r].iter_mut().flatten() {
            *b = b.scale(s);
        }
    }
    op
}

/// `A₂ + A₁` from precomputed coefficient fields.
pub(crate) fn full_symbol(c: &CoefficientFields, p: &EKParams) -> Result<MatrixSymbol> {
    a2_from(c, p).add(&a1_from(c)?)
}

/// `𝕁 Op^BW(A₂ + A₁)` assembled on the mode set.
pub fn generator(v: &StateU, p: &EKParams, cutoff: CutoffParams) -> Result<BlockOp> {
    generator_from(&coefficient_fields(v, p)?, p, cutoff)
}

pub(crate) fn generator_from(c: &CoefficientFields, p: &EKParams, cutoff: CutoffParams) -> Result<BlockOp> {
    Ok(j_rows(assemble_bony_weyl_matrix(&full_symbol(c, p)?, cutoff)?))
}

/// Nonlinear vector field in complex coordinates.
pub fn rhs_complex(v: &StateU, p: &EKParams) -> Result<StateU> {
    to_complex(&ek_rhs_exact(&from_complex(v, p)?, p)?, p)
}

/// The three pieces of the paralinearized field.
#[derive(Clone, Debug)]
pub struct ParalinearSplit {
    pub full: StateU,
    pub para: StateU,
    pub remainder: StateU,
}

impl ParalinearSplit {
    /// `‖full − (para + remainder)‖₀`.
    pub fn identity_defect(&self) -> f64 {
        self.full
            .sub(&self.para.add(&self.remainder).expect("same grid"))
            .expect("same grid")
            .norm(0.0)
    }
}

pub fn paralinear_split(v: &StateU, p: &EKParams, cutoff: CutoffParams) -> Result<ParalinearSplit> {
    let full = rhs_complex(v, p)?;
    let [a, b] = generator(v, p, cutoff)?.apply(v.u.coeffs(), v.ubar.coeffs())?;
    let mut stacked = a;
    stacked.extend(b);
    let para = StateU::from_vec(v.grid(), stacked)?;
    let remainder = full.sub(&para)?;
    Ok(ParalinearSplit {
        full,
        para,
        remainder,
    })
}

/// `R(U) = F(U) − 𝕁 Op^BW(A₂ + A₁) U`.
pub fn remainder_r(v: &StateU, p: &EKParams, cutoff: CutoffParams) -> Result<StateU> {
    Ok(paralinear_split(v, p, cutoff)?.remainder)
}
