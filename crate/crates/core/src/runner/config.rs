//! Run configuration, read from TOML and validated in full at load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calculus::compose::probe_reach;
use crate::calculus::CutoffParams;
use crate::ek::{to_complex, CapillarityLaw, EKParams, PotentialLaw, StateRP, StateU};
use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};
use crate::flow::FlowConfig;
use crate::grid::TorusGrid;
use crate::scheme::SchemeConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub d: usize,
    #[serde(rename = "N_ax")]
    pub n_ax: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EkSection {
    pub mbar: f64,
    #[serde(rename = "K")]
    pub k: CapillarityLaw,
    pub g: PotentialLaw,
    pub m1: f64,
    pub m2: f64,
    pub delta: f64,
}

/// Initial datum as a trigonometric series in `x₁`: entry `i` of each list
/// multiplies `cos((i+1)x₁)` or `sin((i+1)x₁)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default)]
    pub rho_cos: Vec<f64>,
    #[serde(default)]
    pub rho_sin: Vec<f64>,
    #[serde(default)]
    pub phi_cos: Vec<f64>,
    #[serde(default)]
    pub phi_sin: Vec<f64>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            rho_cos: vec![0.1],
            rho_sin: vec![],
            phi_cos: vec![],
            phi_sin: vec![0.1],
        }
    }
}

/// Sizes and horizons of the studies behind each suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudiesSection {
    pub samples: usize,
    pub paraproduct_n_ax: usize,
    pub quantization_n_ax: usize,
    pub composition_n_ax: usize,
    pub sigma: f64,
    pub energy_n_ax: usize,
    pub energy_eps: Vec<f64>,
    #[serde(rename = "energy_T")]
    pub energy_t: f64,
    pub equivalence_n_ax: Vec<usize>,
    pub galerkin_n_ax: usize,
    pub galerkin_n: Vec<usize>,
    #[serde(rename = "galerkin_T")]
    pub galerkin_t: f64,
    pub continuity_h: Vec<f64>,
    #[serde(rename = "continuity_T")]
    pub continuity_t: f64,
    #[serde(rename = "reversibility_T")]
    pub reversibility_t: f64,
    /// Largest number of `dt` halvings of the reference solver.
    pub max_refinements: usize,
}

impl Default for StudiesSection {
    fn default() -> Self {
        Self {
            samples: 100,
            paraproduct_n_ax: 128,
            quantization_n_ax: 32,
            composition_n_ax: 512,
            sigma: 1.0,
            energy_n_ax: 128,
            energy_eps: vec![1e-1, 1e-2, 1e-3],
            energy_t: 0.5,
            equivalence_n_ax: vec![32, 64],
            galerkin_n_ax: 256,
            galerkin_n: vec![8, 16, 32, 64],
            galerkin_t: 0.02,
            continuity_h: vec![1e-2, 1e-3, 1e-4],
            continuity_t: 0.1,
            reversibility_t: 0.1,
            max_refinements: 8,
        }
    }
}

impl StudiesSection {
    /// Dyadic levels probed by the composition test on its grid.
    pub fn composition_levels(&self, cutoff: CutoffParams) -> Vec<u32> {
        let kmax = (self.composition_n_ax / 2).saturating_sub(1) as f64;
        (1..20).filter(|&k| probe_reach(k, cutoff) <= kmax).collect()
    }

    fn violations(&self, cutoff: CutoffParams) -> Vec<String> {
        let mut v = Vec::new();
        let grids = [
            ("paraproduct_n_ax", self.paraproduct_n_ax),
            ("quantization_n_ax", self.quantization_n_ax),
            ("composition_n_ax", self.composition_n_ax),
            ("energy_n_ax", self.energy_n_ax),
            ("galerkin_n_ax", self.galerkin_n_ax),
        ];
        let extra = self.equivalence_n_ax.iter().map(|&n| ("equivalence_n_ax", n));
        for (name, n) in grids.into_iter().chain(extra) {
            if let Err(e) = TorusGrid::new(1, n) {
                v.push(format!("studies.{name}: {e}"));
            }
        }
        if self.samples == 0 {
            v.push("studies.samples must be positive".into());
        }
        if !(self.sigma >= 0.0) {
            v.push(format!("studies.sigma = {} must be >= 0", self.sigma));
        }
        if self.energy_eps.is_empty() || self.energy_eps.iter().any(|&e| !(e > 0.0)) {
            v.push("studies.energy_eps must be a non-empty list of positive numbers".into());
        }
        if self.equivalence_n_ax.len() < 2 {
            v.push("studies.equivalence_n_ax needs two resolutions".into());
        }
        if self.galerkin_n.len() < 2 {
            v.push("studies.galerkin_n needs at least two truncations".into());
        }
        let kmax = (self.galerkin_n_ax / 2).saturating_sub(1);
        if let Some(&n) = self.galerkin_n.iter().find(|&&n| n == 0 || n >= kmax) {
            v.push(format!("studies.galerkin_n entry {n} must lie in [1, {kmax})"));
        }
        if self.continuity_h.is_empty() || self.continuity_h.iter().any(|&h| !(h > 0.0)) {
            v.push("studies.continuity_h must be a non-empty list of positive numbers".into());
        }
        for (name, t) in [
            ("energy_T", self.energy_t),
            ("galerkin_T", self.galerkin_t),
            ("continuity_T", self.continuity_t),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                v.push(format!("studies.{name} = {t} must be positive"));
            }
        }
        if !(self.reversibility_t >= 0.0 && self.reversibility_t.is_finite()) {
            v.push(format!("studies.reversibility_T = {} must be >= 0", self.reversibility_t));
        }
        if self.composition_levels(cutoff).len() < 3 {
            v.push(format!(
                "studies.composition_n_ax = {} resolves fewer than three dyadic probe levels",
                self.composition_n_ax
            ));
        }
        v
    }
}

fn default_cutoff_eps() -> f64 {
    0.125
}

fn default_flow() -> FlowConfig {
    FlowConfig::new(1e-2, 0.2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub ek: EkSection,
    #[serde(default = "default_cutoff_eps")]
    pub cutoff_eps: f64,
    #[serde(default = "default_flow")]
    pub flow: FlowConfig,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub studies: StudiesSection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// `d = 1`, `N_ax = 128`, `m̄ = 1`, `K ≡ 1`, `g(ρ) = ρ`,
    /// `(ρ0, φ0) = (0.1 cos x, 0.1 sin x)`.
    pub fn standard() -> Self {
        Self {
            grid: GridSection { d: 1, n_ax: 128 },
            ek: EkSection {
                mbar: 1.0,
                k: CapillarityLaw::Constant { k0: 1.0 },
                g: PotentialLaw::Linear { c: 1.0 },
                m1: 0.5,
                m2: 1.5,
                delta: 0.05,
            },
            cutoff_eps: default_cutoff_eps(),
            flow: default_flow(),
            scheme: SchemeConfig::default(),
            data: DataSection::default(),
            studies: StudiesSection::default(),
            seed: 0,
            output: None,
        }
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if let Err(e) = TorusGrid::new(self.grid.d, self.grid.n_ax) {
            v.push(format!("grid: {e}"));
        }
        if let Err(e) = self.params() {
            v.push(format!("ek: {e}"));
        }
        let cutoff = match CutoffParams::new(self.cutoff_eps) {
            Ok(c) => c,
            Err(e) => {
                v.push(e.to_string());
                CutoffParams::default()
            }
        };
        v.extend(self.flow.violations());
        v.extend(self.scheme.violations(self.grid.d.max(1)));
        v.extend(self.studies.violations(cutoff));
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid.d, self.grid.n_ax)
    }

    pub fn params(&self) -> Result<EKParams> {
        let e = &self.ek;
        EKParams::new(e.mbar, e.k.clone(), e.g.clone(), e.m1, e.m2, e.delta)
    }

    pub fn cutoff(&self) -> Result<CutoffParams> {
        CutoffParams::new(self.cutoff_eps)
    }

    /// The initial datum `(ρ0, φ0)` on `grid`.
    pub fn datum_on(&self, grid: TorusGrid) -> Result<StateRP> {
        let series = |cos: &[f64], sin: &[f64]| {
            FourierField::from_fn(grid, FieldFlags::REAL_ZERO_MEAN, |x| {
                let c: f64 = cos.iter().enumerate().map(|(i, a)| a * ((i + 1) as f64 * x[0]).cos()).sum();
                let s: f64 = sin.iter().enumerate().map(|(i, a)| a * ((i + 1) as f64 * x[0]).sin()).sum();
                c + s
            })
        };
        StateRP::new(
            series(&self.data.rho_cos, &self.data.rho_sin),
            series(&self.data.phi_cos, &self.data.phi_sin),
        )
    }

    pub fn datum(&self) -> Result<StateRP> {
        self.datum_on(self.grid()?)
    }

    pub fn datum_u(&self) -> Result<StateU> {
        to_complex(&self.datum()?, &self.params()?)
    }
}

/// Parses and validates a TOML document; unknown keys are errors.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::Integrator;

    const MINIMAL: &str = r#"
[grid]
d = 1
N_ax = 64

[ek]
mbar = 1.0
K = { law = "constant", k0 = 1.0 }
g = { law = "linear", c = 1.0 }
m1 = 0.5
m2 = 1.5
delta = 0.05
"#;

    fn messages(text: &str) -> Vec<String> {
        match parse_config_str(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.cutoff_eps, 0.125);
        assert_eq!(c.flow.integrator, Integrator::Rk4Fixed);
        assert_eq!(c.flow.flow_eps, None);
        assert_eq!(c.scheme, SchemeConfig::default());
        assert_eq!(c.data, DataSection::default());
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn borderline_s0_is_rejected() {
        let text = format!("{MINIMAL}\n[scheme]\ns0 = 1.0\ns = 3.0\n");
        let m = messages(&text);
        assert_eq!(m.len(), 1);
        assert!(m[0].contains("strictly below s - 2"), "{m:?}");
    }

    #[test]
    fn every_violation_is_listed() {
        let text = "cutoff_eps = 0.3\n".to_string()
            + &MINIMAL.replace("m1 = 0.5", "m1 = 2.0").replace("N_ax = 64", "N_ax = 63")
            + "[flow]\ndt = -1.0\nT = 0.1\n";
        let m = messages(&text);
        assert!(m.iter().any(|s| s.starts_with("grid:")), "{m:?}");
        assert!(m.iter().any(|s| s.contains("m1 < m2")), "{m:?}");
        assert!(m.iter().any(|s| s.contains("cutoff_eps")), "{m:?}");
        assert!(m.iter().any(|s| s.contains("flow.dt")), "{m:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let m = messages(&format!("{MINIMAL}\nbogus = 1\n"));
        assert!(m[0].contains("bogus"), "{m:?}");
        let m = messages(&format!("{MINIMAL}\n[scheme]\ntol_fixx = 1e-9\n"));
        assert!(m[0].contains("tol_fixx"), "{m:?}");
    }

    #[test]
    fn standard_scenario_round_trips() {
        let c = RunConfig::standard();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_config_str(&text).unwrap(), c);
        let s = c.datum().unwrap();
        assert!((s.rho.coeff([1, 0]).re - 0.05).abs() < 1e-15);
        assert!((s.phi.coeff([1, 0]).im + 0.05).abs() < 1e-15);
    }
}
