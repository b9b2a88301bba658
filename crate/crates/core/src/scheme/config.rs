use serde::{Deserialize, Serialize};

/// Fixed-point and reference-solver tolerances of the nonlinear scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default = "default_tol_fix")]
    pub tol_fix: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Low norm index; `d/2 + 0.1` when absent.
    #[serde(default)]
    pub s0: Option<f64>,
    /// High norm index; `s0 + 2.5` when absent.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_tol_ref")]
    pub tol_ref: f64,
    /// Growth constant `C` of the abort test `‖Uₙ‖_{s0+2} > 4 C ‖U0‖_{s0+2}`.
    #[serde(default = "default_growth_c")]
    pub growth_c: f64,
    /// Largest number of `T` halvings while searching for contraction.
    #[serde(default = "default_max_halvings")]
    pub max_halvings: usize,
}

fn default_tol_fix() -> f64 {
    1e-9
}
fn default_n_max() -> usize {
    40
}
fn default_tol_ref() -> f64 {
    1e-10
}
fn default_growth_c() -> f64 {
    2.0
}
fn default_max_halvings() -> usize {
    8
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            tol_fix: default_tol_fix(),
            n_max: default_n_max(),
            s0: None,
            s: None,
            tol_ref: default_tol_ref(),
            growth_c: default_growth_c(),
            max_halvings: default_max_halvings(),
        }
    }
}

impl SchemeConfig {
    pub fn s0(&self, dim: usize) -> f64 {
        self.s0.unwrap_or(dim as f64 / 2.0 + 0.1)
    }

    pub fn s(&self, dim: usize) -> f64 {
        self.s.unwrap_or(self.s0(dim) + 2.5)
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self, dim: usize) -> Vec<String> {
        let mut v = Vec::new();
        let (s0, s) = (self.s0(dim), self.s(dim));
        if !(s0 > dim as f64 / 2.0) {
            v.push(format!("scheme.s0 = {s0} must exceed d/2 = {}", dim as f64 / 2.0));
        }
        if !(s0 < s - 2.0) {
            v.push(format!("scheme.s0 = {s0} must be strictly below s - 2 = {}", s - 2.0));
        }
        if !(self.tol_fix > 0.0) {
            v.push(format!("scheme.tol_fix = {} must be positive", self.tol_fix));
        }
        if !(self.tol_ref > 0.0) {
            v.push(format!("scheme.tol_ref = {} must be positive", self.tol_ref));
        }
        if self.n_max < 2 {
            v.push(format!("scheme.n_max = {} must be at least 2", self.n_max));
        }
        if !(self.growth_c > 0.0) {
            v.push(format!("scheme.growth_c = {} must be positive", self.growth_c));
        }
        v
    }
}
