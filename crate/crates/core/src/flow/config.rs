use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    #[default]
    Rk4Fixed,
    /// Implicit midpoint rule, one dense solve per step.
    MidpointImplicit,
}

/// Time-stepping parameters of a linear flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Mollifier scale; `None` runs the plain truncated generator.
    #[serde(default)]
    pub flow_eps: Option<f64>,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Coefficient refresh interval. Absent means `10·dt`; zero refreshes
    /// at every integrator stage.
    #[serde(default)]
    pub dt_coeff: Option<f64>,
}

fn default_tol() -> f64 {
    1e-8
}

impl FlowConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            flow_eps: None,
            dt,
            t_end,
            integrator: Integrator::Rk4Fixed,
            tol: default_tol(),
            dt_coeff: None,
        }
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            v.push(format!("flow.dt = {} must be positive", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            v.push(format!("flow.T = {} must be positive", self.t_end));
        }
        if !(self.tol > 0.0) {
            v.push(format!("flow.tol = {} must be positive", self.tol));
        }
        if let Some(e) = self.flow_eps {
            if !(e > 0.0 && e.is_finite()) {
                v.push(format!("flow.flow_eps = {e} must be positive"));
            }
        }
        if let Some(h) = self.dt_coeff {
            if !(h >= 0.0 && h.is_finite()) {
                v.push(format!("flow.dt_coeff = {h} must be >= 0"));
            }
        }
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

    /// Refresh interval, or `None` for every stage.
    pub fn refresh_interval(&self) -> Option<f64> {
        match self.dt_coeff {
            None => Some(10.0 * self.dt),
            Some(h) if h > 0.0 => Some(h),
            Some(_) => None,
        }
    }

    /// Number of steps and the step actually used, `T / ⌈T/dt⌉`.
    pub fn steps(&self) -> (usize, f64) {
        let n = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }

    pub fn with_t_end(&self, t_end: f64) -> Self {
        Self {
            t_end,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn with_flow_eps(&self, flow_eps: Option<f64>) -> Self {
        Self {
            flow_eps,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_steps() {
        let c: FlowConfig = toml::from_str("dt = 0.01\nT = 0.1").unwrap();
        assert_eq!(c.integrator, Integrator::Rk4Fixed);
        assert_eq!(c.refresh_interval(), Some(0.1));
        assert_eq!(c.steps().0, 10);
        assert_eq!(c.with_t_end(0.105).steps().0, 11);
        let m: FlowConfig = toml::from_str("dt = 0.01\nT = 1\nintegrator = \"midpoint-implicit\"\ndt_coeff = 0").unwrap();
        assert_eq!(m.integrator, Integrator::MidpointImplicit);
        assert_eq!(m.refresh_interval(), None);
        assert!(toml::from_str::<FlowConfig>("dt = 0.01\nT = 1\nfoo = 2").is_err());
    }

    #[test]
    fn violations_are_listed() {
        let mut c = FlowConfig::new(-1.0, 0.0);
        c.flow_eps = Some(0.0);
        assert_eq!(c.violations().len(), 3);
    }
}
