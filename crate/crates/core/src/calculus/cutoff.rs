//! The even cut-off `χ`: identically 1 on `|ξ| <= 1.1`, identically 0 on
//! `|ξ| >= 1.9`, with a `C^∞` transition built from `exp(-1/t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{xi_norm, Xi};

fn e(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step from 1 (t <= 0) to 0 (t >= 1).
fn psi(t: f64) -> f64 {
    let a = e(1.0 - t);
    let b = e(t);
    a / (a + b)
}

/// `χ` as a function of the radius `|ξ|`.
pub fn chi_radial(r: f64) -> f64 {
    psi((r.abs() - 1.1) / 0.8)
}

pub fn chi(xi: Xi) -> f64 {
    chi_radial(xi_norm(xi))
}

/// Paraproduct cutoff parameter `ε` in `χ_ε(ξ) = χ(ξ/ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffParams {
    eps: f64,
}

impl Default for CutoffParams {
    fn default() -> Self {
        Self { eps: 0.125 }
    }
}

impl CutoffParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(Error::Parameter(format!(
                "cutoff_eps = {eps} must lie in (0, 1/4)"
            )));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `χ_ε(z) = χ(z/ε)` for a scalar radius.
    pub fn chi_eps_radial(&self, r: f64) -> f64 {
        chi_radial(r / self.eps)
    }

    pub fn chi_eps(&self, z: Xi) -> f64 {
        self.chi_eps_radial(xi_norm(z))
    }

    /// Radius beyond which `χ_ε` vanishes.
    pub fn support_radius(&self) -> f64 {
        1.9 * self.eps
    }
}
