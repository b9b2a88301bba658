//! Pseudospectral evaluation of the nonlinear vector field
//!
//! ```text
//! ∂_t ρ = −m̄ Δφ − div(ρ ∇φ)
//! ∂_t φ = −½|∇φ|² − g(m̄ + ρ) + K(m̄ + ρ) Δρ + ½ K′(m̄ + ρ) |∇ρ|²
//! ```
//!
//! Derivatives are spectral; pointwise compositions and products are
//! formed on the 3/2-padded grid.

use num_complex::Complex64;

use super::params::EKParams;
use super::state::{check_admissible, StateRP};
use crate::error::Result;
use crate::field::{FieldFlags, FourierField};
use crate::grid::TorusGrid;

fn laplacian(f: &FourierField) -> FourierField {
    f.map_modes(|j| Complex64::new(-((j[0] * j[0] + j[1] * j[1]) as f64), 0.0))
        .with_flags(FieldFlags::REAL_ZERO_MEAN)
}

fn padded_real(f: &FourierField) -> Vec<f64> {
    f.padded_values().into_iter().map(|z| z.re).collect()
}

fn from_padded(grid: TorusGrid, vals: &[f64], flags: FieldFlags) -> Result<FourierField> {
    let v: Vec<Complex64> = vals.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let c = grid.forward_on(grid.padded_n_ax(), &v)?;
    FourierField::from_coeffs(grid, c, flags)
}

/// Time derivative of `(ρ, φ)`. `ρ̇` has zero mean by its divergence form;
/// `φ̇` is projected to zero mean.
pub fn ek_rhs_exact(s: &StateRP, p: &EKParams) -> Result<StateRP> {
    let grid = s.grid();
    check_admissible(&s.rho, p, 0.0)?;
    let d = grid.dim();
    let mbar = p.mbar();

    let rho = padded_real(&s.rho);
    let lap_rho = padded_real(&laplacian(&s.rho));
    let grad_phi: Vec<Vec<f64>> = (0..d).map(|r| padded_real(&s.phi.partial(r))).collect();
    let grad_rho: Vec<Vec<f64>> = (0..d).map(|r| padded_real(&s.rho.partial(r))).collect();

    let mut rho_dot = laplacian(&s.phi).scale(-mbar);
    for (r, gp) in grad_phi.iter().enumerate() {
        let flux: Vec<f64> = rho.iter().zip(gp).map(|(a, b)| a * b).collect();
        let flux = from_padded(grid, &flux, FieldFlags::REAL)?;
        rho_dot = rho_dot.sub(&flux.partial(r))?;
    }

    let phi_dot: Vec<f64> = (0..rho.len())
        .map(|i| {
            let m = mbar + rho[i];
            let gp2: f64 = grad_phi.iter().map(|g| g[i] * g[i]).sum();
            let gr2: f64 = grad_rho.iter().map(|g| g[i] * g[i]).sum();
            -0.5 * gp2 - p.g(m) + p.k(m) * lap_rho[i] + 0.5 * p.k_prime(m) * gr2
        })
        .collect();
    let phi_dot = from_padded(grid, &phi_dot, FieldFlags::REAL_ZERO_MEAN)?;
    StateRP::new(rho_dot, phi_dot)
}
