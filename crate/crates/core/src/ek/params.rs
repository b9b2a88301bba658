//! Physical data of the Euler–Korteweg system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Capillarity coefficient `K(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase", deny_unknown_fields)]
pub enum CapillarityLaw {
    /// `K ≡ k0`
    Constant { k0: f64 },
    /// Quantum hydrodynamics, `K(m) = κ/m`.
    Qhd { kappa: f64 },
    /// `K(m) = Σ_i coeffs[i] m^i`.
    Polynomial { coeffs: Vec<f64> },
}

impl CapillarityLaw {
    pub fn k(&self, m: f64) -> f64 {
        match self {
            Self::Constant { k0 } => *k0,
            Self::Qhd { kappa } => kappa / m,
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * m + c),
        }
    }

    /// `m K(m)`; exactly `κ` for the quantum law.
    pub fn m_k(&self, m: f64) -> f64 {
        match self {
            Self::Qhd { kappa } => *kappa,
            _ => m * self.k(m),
        }
    }

    pub fn k_prime(&self, m: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Qhd { kappa } => -kappa / (m * m),
            Self::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * m + i as f64 * c),
        }
    }
}

/// Pressure-type potential `g(m)` before normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialLaw {
    /// `g(m) = c (m^γ − m̄^γ)`
    Polytropic { c: f64, gamma: f64 },
    /// `g(m) = c m`
    Linear { c: f64 },
}

impl PotentialLaw {
    fn raw(&self, m: f64) -> f64 {
        match self {
            Self::Polytropic { c, gamma } => c * m.powf(*gamma),
            Self::Linear { c } => c * m,
        }
    }

    fn raw_prime(&self, m: f64) -> f64 {
        match self {
            Self::Polytropic { c, gamma } => c * gamma * m.powf(gamma - 1.0),
            Self::Linear { c } => *c,
        }
    }
}

/// Mean density, constitutive laws and the admissible density window
/// `m̄₁ < m̄ + ρ < m̄₂` with margin `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EKParams {
    mbar: f64,
    k: CapillarityLaw,
    g: PotentialLaw,
    g_shift: f64,
    m1: f64,
    m2: f64,
    delta: f64,
    c_k: f64,
    cap_k: f64,
}

const SAMPLES: usize = 2001;

impl EKParams {
    pub fn new(mbar: f64, k: CapillarityLaw, g: PotentialLaw, m1: f64, m2: f64, delta: f64) -> Result<Self> {
        let mut errs = Vec::new();
        if !(m1 > 0.0 && m1 < m2) {
            errs.push(format!("need 0 < m1 < m2, got m1 = {m1}, m2 = {m2}"));
        }
        if !(mbar > m1 && mbar < m2) {
            errs.push(format!("mbar = {mbar} must lie in (m1, m2) = ({m1}, {m2})"));
        }
        if !(delta > 0.0) {
            errs.push(format!("delta = {delta} must be positive"));
        }
        if !errs.is_empty() {
            return Err(Error::Parameter(errs.join("; ")));
        }
        let kbar = k.k(mbar);
        if !(kbar > 0.0) {
            return Err(Error::Parameter(format!("K(mbar) = {kbar} must be positive")));
        }
        let (mut c_k, mut cap_k) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..SAMPLES {
            let m = m1 + (m2 - m1) * i as f64 / (SAMPLES - 1) as f64;
            let v = k.k(m);
            c_k = c_k.min(v);
            cap_k = cap_k.max(v);
        }
        if !(c_k > 0.0) {
            return Err(Error::Parameter(format!(
                "K is not bounded below by a positive constant on [m1, m2] (min sample {c_k})"
            )));
        }
        let g_shift = g.raw(mbar);
        Ok(Self {
            mbar,
            k,
            g,
            g_shift,
            m1,
            m2,
            delta,
            c_k,
            cap_k,
        })
    }

    pub fn mbar(&self) -> f64 {
        self.mbar
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn capillarity(&self) -> &CapillarityLaw {
        &self.k
    }

    pub fn potential(&self) -> &PotentialLaw {
        &self.g
    }

    pub fn k(&self, m: f64) -> f64 {
        self.k.k(m)
    }

    pub fn k_prime(&self, m: f64) -> f64 {
        self.k.k_prime(m)
    }

    /// `g(m) − g(m̄)`, so that `g(m̄) = 0`.
    pub fn g(&self, m: f64) -> f64 {
        self.g.raw(m) - self.g_shift
    }

    pub fn g_prime(&self, m: f64) -> f64 {
        self.g.raw_prime(m)
    }

    pub fn m_k(&self, m: f64) -> f64 {
        self.k.m_k(m)
    }

    pub fn kbar(&self) -> f64 {
        self.k.k(self.mbar)
    }

    /// Sampled `min K` on `[m̄₁, m̄₂]`.
    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    /// Sampled `max K` on `[m̄₁, m̄₂]`.
    pub fn cap_k(&self) -> f64 {
        self.cap_k
    }

    /// `α = (m̄/K(m̄))^{1/4}`.
    pub fn alpha(&self) -> f64 {
        (self.mbar / self.kbar()).powf(0.25)
    }

    /// `√(m̄ K(m̄))`, the dispersion speed of the linearized flow.
    pub fn dispersion(&self) -> f64 {
        self.m_k(self.mbar).sqrt()
    }

    /// `(λ_min, λ_max)`.
    pub fn lambda_bounds(&self) -> (f64, f64) {
        let d = self.m_k(self.mbar);
        ((self.m1 * self.c_k / d).sqrt(), (self.m2 * self.cap_k / d).sqrt())
    }
}
