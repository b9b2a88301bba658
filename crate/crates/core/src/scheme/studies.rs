//! Flow-map studies built on the reference solver: reversibility,
//! Galerkin truncation, continuity, and agreement with the iteration.

use rayon::prelude::*;
use serde::Serialize;

use super::config::SchemeConfig;
use super::iterate::{iterate, SchemeRun};
use super::reference::{integrate_rk4, reference_solve, ReferenceConfig};
use crate::calculus::CutoffParams;
use crate::ek::{from_complex, involution_s, to_complex, EKParams, StateRP, StateU};
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Trajectory};

#[derive(Clone, Debug, Serialize)]
pub struct ReversibilityReport {
    pub t: f64,
    pub defect: f64,
    pub dt_forward: f64,
    pub dt_backward: f64,
}

/// `‖S Ω^{−t}(S s0) − Ω^t(s0)‖_{s0}` with both flows from [`reference_solve`].
pub fn reversibility_check(s0: &StateRP, p: &EKParams, cfg: &ReferenceConfig) -> Result<ReversibilityReport> {
    if cfg.t_end == 0.0 {
        let d = involution_s(&involution_s(s0)).sub(s0)?;
        return Ok(ReversibilityReport {
            t: 0.0,
            defect: to_complex(&d, p)?.norm(cfg.s0),
            dt_forward: 0.0,
            dt_backward: 0.0,
        });
    }
    let fwd = reference_solve(s0, p, &ReferenceConfig { direction: 1.0, ..cfg.clone() })?;
    let bwd = reference_solve(&involution_s(s0), p, &ReferenceConfig { direction: -1.0, ..cfg.clone() })?;
    let back = involution_s(&from_complex(&bwd.traj.last()?, p)?);
    let fwd_end = from_complex(&fwd.traj.last()?, p)?;
    Ok(ReversibilityReport {
        t: cfg.t_end,
        defect: to_complex(&back.sub(&fwd_end)?, p)?.norm(cfg.s0),
        dt_forward: fwd.dt,
        dt_backward: bwd.dt,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GalerkinRow {
    pub n: usize,
    /// `‖U0 − Π_N U0‖_s`
    pub data_error: f64,
    /// `sup_t ‖U(t) − U_N(t)‖_s`
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GalerkinTable {
    pub s: f64,
    pub s0: f64,
    pub dt: f64,
    pub rows: Vec<GalerkinRow>,
    /// Least-squares slope of `log error` against `log N`.
    pub slope: f64,
}

impl GalerkinTable {
    /// Predicted rate `−(s − s0 − 2)`.
    pub fn predicted(&self) -> f64 {
        -(self.s - self.s0 - 2.0)
    }

    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= w[0].error)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Step size accepted by [`reference_solve`] for `s0`, then reused for every
/// other datum so that all trajectories share one time grid.
fn common_dt(s0: &StateRP, p: &EKParams, cfg: &ReferenceConfig) -> Result<(f64, Trajectory)> {
    let sol = reference_solve(s0, p, cfg)?;
    Ok((sol.dt, sol.traj))
}

/// Solves from `U0` and from each `Π_N U0` and tabulates the sup-in-time
/// distance in `H^s`.
pub fn galerkin_study(
    u0: &StateU,
    p: &EKParams,
    cfg: &ReferenceConfig,
    s: f64,
    n_list: &[usize],
) -> Result<GalerkinTable> {
    if n_list.len() < 2 {
        return Err(Error::Parameter("galerkin_study needs at least two truncations".into()));
    }
    let full = from_complex(u0, p)?;
    let (dt, truth) = common_dt(&full, p, cfg)?;
    let rows = n_list
        .par_iter()
        .map(|&n| -> Result<GalerkinRow> {
            let trunc = StateRP::new(full.rho.project_low(n as f64), full.phi.project_low(n as f64))?;
            let data_error = to_complex(&full.sub(&trunc)?, p)?.norm(s);
            let traj = integrate_rk4(&trunc, p, dt, cfg.t_end, cfg.direction)?;
            Ok(GalerkinRow {
                n,
                data_error,
                error: truth.sup_diff(&traj, s, false)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.error).collect();
    Ok(GalerkinTable {
        s,
        s0: cfg.s0,
        dt,
        slope: loglog_slope(&x, &y),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityRow {
    pub h: f64,
    /// `sup_t ‖Ω^t(U0 + h W) − Ω^t(U0)‖_s`
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityTable {
    pub s: f64,
    pub dt: f64,
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityTable {
    /// Rows sorted by decreasing `h` have strictly decreasing errors.
    pub fn strictly_decreasing(&self) -> bool {
        let mut r = self.rows.clone();
        r.sort_by(|a, b| b.h.total_cmp(&a.h));
        r.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// Perturbation-response table of the flow map at `U0` in direction `W`.
pub fn continuity_probe(
    s0: &StateRP,
    w: &StateRP,
    h_list: &[f64],
    p: &EKParams,
    cfg: &ReferenceConfig,
    s: f64,
) -> Result<ContinuityTable> {
    let (dt, base) = common_dt(s0, p, cfg)?;
    let rows = h_list
        .par_iter()
        .map(|&h| -> Result<ContinuityRow> {
            let traj = integrate_rk4(&s0.add(&w.scale(h))?, p, dt, cfg.t_end, cfg.direction)?;
            Ok(ContinuityRow {
                h,
                error: base.sup_diff(&traj, s, false)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityTable { s, dt, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub t_used: f64,
    /// `‖U_iter(T̆) − U_ref(T̆)‖_{s0}`
    pub distance: f64,
    pub reference_dt: f64,
    pub reference_change: f64,
    /// Largest `|mass − m̄|` along the reference trajectory.
    pub reference_mass_defect: f64,
}

/// Runs the iteration and compares its final state with the reference
/// solver at the accepted horizon.
pub fn scheme_vs_reference(
    u0: &StateU,
    p: &EKParams,
    flow: &FlowConfig,
    scheme: &SchemeConfig,
    cutoff: CutoffParams,
) -> Result<(SchemeRun, Agreement)> {
    let run = iterate(u0, p, flow, scheme, cutoff)?;
    let s0 = scheme.s0(u0.grid().dim());
    let t_used = run.report.t_used;
    let start = from_complex(u0, p)?;
    let cfg = ReferenceConfig {
        dt: run.report.dt,
        t_end: t_used,
        tol_ref: scheme.tol_ref,
        s0,
        max_refinements: 8,
        direction: 1.0,
    };
    let sol = reference_solve(&start, p, &cfg)?;
    let mut mass: f64 = 0.0;
    for k in 0..sol.traj.len() {
        mass = mass.max((crate::ek::mass_u(&sol.traj.state(k)?, p) - p.mbar()).abs());
    }
    let distance = run.trajectory.last()?.sub(&sol.traj.last()?)?.norm(s0);
    Ok((
        run,
        Agreement {
            t_used,
            distance,
            reference_dt: sol.dt,
            reference_change: sol.last_change,
            reference_mass_defect: mass,
        },
    ))
}
