//! Real `(ρ, φ)` states, complex `U = (u, ū)` states, and the maps between
//! them.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::params::EKParams;
use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};
use crate::grid::TorusGrid;
use crate::norms::sobolev_norm;

/// Density fluctuation and velocity potential, both real with zero mean.
#[derive(Clone, Debug, PartialEq)]
pub struct StateRP {
    pub rho: FourierField,
    pub phi: FourierField,
}

impl StateRP {
    pub fn new(rho: FourierField, phi: FourierField) -> Result<Self> {
        rho.check_grid(&phi)?;
        Ok(Self {
            rho: rho.with_flags(FieldFlags::REAL_ZERO_MEAN),
            phi: phi.with_flags(FieldFlags::REAL_ZERO_MEAN),
        })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            rho: FourierField::zeros(grid),
            phi: FourierField::zeros(grid),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.rho.grid()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            rho: self.rho.add(&o.rho)?,
            phi: self.phi.add(&o.phi)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            rho: self.rho.sub(&o.rho)?,
            phi: self.phi.sub(&o.phi)?,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rho: self.rho.scale(s),
            phi: self.phi.scale(s),
        }
    }

    /// `(‖ρ‖_s² + ‖φ‖_s²)^{1/2}`.
    pub fn norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.rho, s).hypot(sobolev_norm(&self.phi, s))
    }
}

/// The pair `U = (u, ū)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateU {
    pub u: FourierField,
    pub ubar: FourierField,
}

impl StateU {
    /// Builds `(u, conj u)` from `u`.
    pub fn from_u(u: FourierField) -> Self {
        let ubar = u.conj();
        Self { u, ubar }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::from_u(FourierField::zeros(grid).with_flags(FieldFlags::COMPLEX))
    }

    pub fn grid(&self) -> TorusGrid {
        self.u.grid()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.add(&o.u)?,
            ubar: self.ubar.add(&o.ubar)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.sub(&o.u)?,
            ubar: self.ubar.sub(&o.ubar)?,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            u: self.u.scale(s),
            ubar: self.ubar.scale(s),
        }
    }

    /// `(‖u‖_s² + ‖ū‖_s²)^{1/2}`.
    pub fn norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.u, s).hypot(sobolev_norm(&self.ubar, s))
    }

    /// Both coefficient vectors concatenated.
    pub fn to_vec(&self) -> Vec<Complex64> {
        let mut v = self.u.coeffs().to_vec();
        v.extend_from_slice(self.ubar.coeffs());
        v
    }

    pub fn from_vec(grid: TorusGrid, v: Vec<Complex64>) -> Result<Self> {
        let n = grid.num_modes();
        if v.len() != 2 * n {
            return Err(Error::SizeMismatch {
                expected: 2 * n,
                found: v.len(),
            });
        }
        let ubar = v[n..].to_vec();
        let mut u = v;
        u.truncate(n);
        Ok(Self {
            u: FourierField::from_coeffs(grid, u, FieldFlags::COMPLEX)?,
            ubar: FourierField::from_coeffs(grid, ubar, FieldFlags::COMPLEX)?,
        })
    }

    /// Largest `|ū_j − conj(u_{-j})|`.
    pub fn conjugation_defect(&self) -> f64 {
        self.ubar.max_abs_diff(&self.u.conj())
    }
}

/// `u = (α^{-1} ρ + i α φ)/√2` with `α = (m̄/K(m̄))^{1/4}`.
pub fn to_complex(s: &StateRP, p: &EKParams) -> Result<StateU> {
    let kbar = p.kbar();
    if !(kbar > 0.0) {
        return Err(Error::Parameter(format!("K(mbar) = {kbar} must be positive")));
    }
    let a = p.alpha();
    let u = s
        .rho
        .scale(1.0 / (a * SQRT_2))
        .add(&s.phi.scale_complex(Complex64::new(0.0, a / SQRT_2)))?
        .with_flags(FieldFlags {
            real: false,
            zero_mean: true,
        });
    Ok(StateU::from_u(u))
}

/// Inverse of [`to_complex`]: `ρ = (α/√2) Π₀^⊥(u + ū)`,
/// `φ = (−i/(√2 α)) (u − ū)`; both are then made exactly real.
pub fn from_complex(v: &StateU, p: &EKParams) -> Result<StateRP> {
    let a = p.alpha();
    let rho = v.u.add(&v.ubar)?.scale(a / SQRT_2).project_zero_mean();
    let phi = v
        .u
        .sub(&v.ubar)?
        .scale_complex(Complex64::new(0.0, -1.0 / (SQRT_2 * a)));
    StateRP::new(rho, phi)
}

/// Smallest and largest grid values of `m̄ + ρ`.
pub fn density_range(rho: &FourierField, p: &EKParams) -> (f64, f64) {
    rho.real_values()
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(p.mbar() + r), hi.max(p.mbar() + r))
        })
}

/// Checks `m̄₁ + margin <= m̄ + ρ(x) <= m̄₂ − margin` at every grid point and
/// returns the smallest slack.
pub fn check_admissible(rho: &FourierField, p: &EKParams, margin: f64) -> Result<f64> {
    let lo = p.m1() + margin;
    let hi = p.m2() - margin;
    let g = rho.grid();
    let mut slack = f64::INFINITY;
    for (i, r) in rho.real_values().into_iter().enumerate() {
        let m = p.mbar() + r;
        // the bare window is open, the shrunken one closed
        let (above, below) = if margin > 0.0 { (m >= lo, m <= hi) } else { (m > lo, m < hi) };
        if !above {
            return Err(Error::Inadmissible {
                x: g.point(i),
                value: m,
                bound: format!("lower bound m1 + margin = {lo}"),
            });
        }
        if !below {
            return Err(Error::Inadmissible {
                x: g.point(i),
                value: m,
                bound: format!("upper bound m2 - margin = {hi}"),
            });
        }
        slack = slack.min(m - lo).min(hi - m);
    }
    Ok(slack)
}

/// `m̄ + mean(ρ)`.
pub fn mass(s: &StateRP, p: &EKParams) -> f64 {
    p.mbar() + s.rho.coeff([0, 0]).re
}

/// `m̄ + mean(ρ(U))` read off before the zero-mean projection of
/// [`from_complex`].
pub fn mass_u(v: &StateU, p: &EKParams) -> f64 {
    let z = v.grid().zero_index();
    p.mbar() + p.alpha() / SQRT_2 * (v.u.coeffs()[z] + v.ubar.coeffs()[z]).re
}

/// `S(ρ, φ)(x) = (ρ(−x), −φ(−x))`.
pub fn involution_s(s: &StateRP) -> StateRP {
    StateRP {
        rho: s.rho.reflect(),
        phi: s.phi.reflect().scale(-1.0),
    }
}
