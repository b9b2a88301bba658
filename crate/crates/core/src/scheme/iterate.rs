//! The iteration `∂_t Uₙ = 𝕁 Op^BW(A(Uₙ₋₁)) Uₙ + R(Uₙ₋₁)`, `Uₙ(0) = U0`,
//! started from the free dispersive flow `U₁`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::config::SchemeConfig;
use crate::calculus::CutoffParams;
use crate::ek::paralin::{coefficient_fields, generator_from};
use crate::ek::{ek_rhs_exact, from_complex, mass_u, rhs_complex, to_complex, EKParams, StateU};
use crate::error::{Error, Result};
use crate::flow::{solve_linear, stacked_norm, FlowConfig, Frozen, LinearProblem, Trajectory};
use crate::grid::TorusGrid;

/// Exact solution of `∂_t U = 𝕁 √(m̄K(m̄)) |D|² U`:
/// `u_j(t) = e^{−i√(m̄K(m̄))|j|² t} u0_j`, `ū_j(t) = e^{+i√(m̄K(m̄))|j|² t} ū0_j`.
pub fn initial_flow(u0: &StateU, p: &EKParams, times: &[f64]) -> Trajectory {
    let g = u0.grid();
    let w = p.dispersion();
    let n = g.num_modes();
    let y0 = u0.to_vec();
    let omega: Vec<f64> = (0..2 * n)
        .map(|i| {
            let j = g.mode(i % n);
            let s = if i < n { -1.0 } else { 1.0 };
            s * w * (j[0] * j[0] + j[1] * j[1]) as f64
        })
        .collect();
    Trajectory::from_fn(g, times, |t| {
        let y: Vec<Complex64> = y0
            .iter()
            .zip(&omega)
            .map(|(c, &om)| c * Complex64::from_polar(1.0, om * t))
            .collect();
        let dy = y.iter().zip(&omega).map(|(c, &om)| c * Complex64::new(0.0, om)).collect();
        (y, dy)
    })
}

/// Linear problem with coefficients and forcing read from the previous
/// iterate.
struct SchemeProblem<'a> {
    prev: &'a Trajectory,
    p: &'a EKParams,
    cutoff: CutoffParams,
}

impl LinearProblem for SchemeProblem<'_> {
    fn grid(&self) -> TorusGrid {
        self.prev.grid()
    }

    fn frozen(&self, t: f64) -> Result<Arc<Frozen>> {
        let v = self.prev.state_at(t)?;
        let c = coefficient_fields(&v, self.p)?;
        let op = generator_from(&c, self.p, self.cutoff)?;
        let full = to_complex(&ek_rhs_exact(&c.state, self.p)?, self.p)?.to_vec();
        let n = v.grid().num_modes();
        let y = v.to_vec();
        let [a, b] = op.apply(&y[..n], &y[n..])?;
        let forcing = full
            .iter()
            .zip(a.iter().chain(b.iter()))
            .map(|(f, g)| f - g)
            .collect();
        Ok(Arc::new(Frozen {
            op,
            forcing: Some(forcing),
        }))
    }
}

/// One row per iterate.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRow {
    pub n: usize,
    pub t_end: f64,
    pub norm_s0: f64,
    pub norm_s0p2: f64,
    pub norm_s: f64,
    /// `sup_t ‖Uₙ − Uₙ₋₁‖_{s0}`; for `n = 1` the comparison is with the
    /// constant datum.
    pub diff_s0: f64,
    /// `min_{t,x} (m̄ + ρ(Uₙ))`
    pub density_min: f64,
    /// `max_{t,x} (m̄ + ρ(Uₙ))`
    pub density_max: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IterationTrace {
    pub rows: Vec<IterationRow>,
}

impl IterationTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,T,norm_s0,norm_s0p2,norm_s,diff_s0,density_min,density_max\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                r.n, r.t_end, r.norm_s0, r.norm_s0p2, r.norm_s, r.diff_s0, r.density_min, r.density_max
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    /// Accepted horizon `T̆`.
    pub t_used: f64,
    pub dt: f64,
    /// Horizons tried, in order.
    pub t_attempts: Vec<f64>,
    pub n_iters: usize,
    /// `‖Uₙ − Uₙ₋₁‖ / ‖Uₙ₋₁ − Uₙ₋₂‖` for `n >= 3`.
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
    pub aborted_admissibility: bool,
    pub aborted_growth: bool,
    pub abort_reason: Option<String>,
    /// `max_t ‖∂_t Uₙ − F(Uₙ)‖₀` over sampled times of the last iterate.
    pub residual: f64,
    /// `max_t |mass(Uₙ(t)) − m̄|` of the last iterate.
    pub mass_defect: f64,
    /// Coefficients `[re, im]` of `u` at `T̆`.
    pub final_u: Vec<[f64; 2]>,
    pub trace: IterationTrace,
}

/// Result of [`iterate`]: the report and the last iterate's trajectory.
#[derive(Clone, Debug)]
pub struct SchemeRun {
    pub report: SolveReport,
    pub trajectory: Trajectory,
}

const ACCEPT_FACTOR: f64 = 0.6;
const CHECKED_FACTORS: usize = 3;

enum Outcome {
    Accepted,
    NotContracting,
    Admissibility(String),
    Growth(String),
}

struct Attempt {
    outcome: Outcome,
    rows: Vec<IterationRow>,
    factors: Vec<f64>,
    converged: bool,
    last: Trajectory,
}

fn density_range_along(traj: &Trajectory, p: &EKParams) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..traj.len() {
        let s = from_complex(&traj.state(k)?, p)?;
        let (a, b) = crate::ek::density_range(&s.rho, p);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

fn row(n: usize, traj: &Trajectory, diff: f64, p: &EKParams, s0: f64, s: f64) -> Result<IterationRow> {
    let (density_min, density_max) = density_range_along(traj, p)?;
    Ok(IterationRow {
        n,
        t_end: traj.t_end(),
        norm_s0: traj.sup_norm(s0, false),
        norm_s0p2: traj.sup_norm(s0 + 2.0, false),
        norm_s: traj.sup_norm(s, false),
        diff_s0: diff,
        density_min,
        density_max,
    })
}

fn attempt(u0: &StateU, p: &EKParams, flow: &FlowConfig, cfg: &SchemeConfig, cutoff: CutoffParams) -> Result<Attempt> {
    let g = u0.grid();
    let (s0, s) = (cfg.s0(g.dim()), cfg.s(g.dim()));
    let (steps, h) = flow.steps();
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let y0 = u0.to_vec();
    let limit = 4.0 * cfg.growth_c * stacked_norm(g, &y0, s0 + 2.0, false);
    let (lo, hi) = (p.m1() + 0.5 * p.delta(), p.m2() - 0.5 * p.delta());

    let mut prev = initial_flow(u0, p, &times);
    let d1 = prev
        .states
        .iter()
        .map(|y| {
            let d: Vec<Complex64> = y.iter().zip(&y0).map(|(a, b)| a - b).collect();
            stacked_norm(g, &d, s0, false)
        })
        .fold(0.0, f64::max);
    let mut rows = vec![row(1, &prev, d1, p, s0, s)?];
    let mut factors = Vec::new();
    let mut diffs = vec![d1];
    let finish = |outcome, rows, factors, converged, last| Attempt {
        outcome,
        rows,
        factors,
        converged,
        last,
    };
    if d1 <= cfg.tol_fix {
        return Ok(finish(Outcome::Accepted, rows, factors, true, prev));
    }
    let lin = FlowConfig {
        dt_coeff: Some(0.0),
        ..flow.clone()
    };
    for n in 2..=cfg.n_max {
        let problem = SchemeProblem { prev: &prev, p, cutoff };
        let next = match solve_linear(&problem, u0, &lin) {
            Ok(t) => t,
            Err(e @ Error::AdmissibilityLost { .. }) => {
                return Ok(finish(Outcome::Admissibility(e.to_string()), rows, factors, false, prev));
            }
            Err(e) => return Err(e),
        };
        let d = next.sup_diff(&prev, s0, false)?;
        let r = row(n, &next, d, p, s0, s)?;
        let (dmin, dmax, top) = (r.density_min, r.density_max, r.norm_s0p2);
        rows.push(r);
        if n >= 3 {
            factors.push(d / diffs[diffs.len() - 1]);
        }
        diffs.push(d);
        if dmin < lo || dmax > hi {
            let msg = format!("iterate {n}: density range [{dmin}, {dmax}] leaves [{lo}, {hi}]");
            return Ok(finish(Outcome::Admissibility(msg), rows, factors, false, next));
        }
        if top > limit {
            let e = Error::Growth {
                iterate: n,
                norm: top,
                limit,
            };
            return Ok(finish(Outcome::Growth(e.to_string()), rows, factors, false, next));
        }
        let early = factors.len() <= CHECKED_FACTORS && factors.last().is_some_and(|&q| q > ACCEPT_FACTOR);
        if early {
            return Ok(finish(Outcome::NotContracting, rows, factors, false, next));
        }
        prev = next;
        if d <= cfg.tol_fix {
            return Ok(finish(Outcome::Accepted, rows, factors, true, prev));
        }
    }
    Ok(finish(Outcome::Accepted, rows, factors, false, prev))
}

/// Runs the scheme, halving `T` until the first contraction factors are
/// at most 0.6 and the iterates stay admissible and bounded.
pub fn iterate(
    u0: &StateU,
    p: &EKParams,
    flow: &FlowConfig,
    cfg: &SchemeConfig,
    cutoff: CutoffParams,
) -> Result<SchemeRun> {
    flow.validate()?;
    let s0_state = from_complex(u0, p)?;
    crate::ek::check_admissible(&s0_state.rho, p, p.delta())?;
    let g = u0.grid();
    let dt = flow.dt.min(super::reference::stable_dt(&s0_state, p, cutoff, 0.4)?);
    let mut t_end = flow.t_end;
    let mut t_attempts = Vec::new();
    let mut rows = Vec::new();
    for k in 0..=cfg.max_halvings {
        t_attempts.push(t_end);
        let fc = flow.with_t_end(t_end).with_dt(dt);
        let a = attempt(u0, p, &fc, cfg, cutoff)?;
        rows.extend(a.rows.iter().cloned());
        let last_try = k == cfg.max_halvings;
        let (adm, growth, reason) = match &a.outcome {
            Outcome::Accepted => (false, false, None),
            Outcome::Admissibility(m) if last_try => (true, false, Some(m.clone())),
            Outcome::Growth(m) if last_try => (false, true, Some(m.clone())),
            Outcome::NotContracting if last_try => (false, false, Some("no contraction at smallest T".into())),
            _ => {
                t_end *= 0.5;
                continue;
            }
        };
        let traj = a.last;
        let (residual, mass_defect) = diagnostics(&traj, p)?;
        let fin = traj.last()?;
        let report = SolveReport {
            t_used: t_end,
            dt: fc.steps().1,
            t_attempts,
            n_iters: a.rows.len(),
            contraction_factors: a.factors,
            converged: a.converged,
            aborted_admissibility: adm,
            aborted_growth: growth,
            abort_reason: reason,
            residual,
            mass_defect,
            final_u: fin.u.coeffs().iter().map(|z| [z.re, z.im]).collect(),
            trace: IterationTrace { rows },
        };
        debug_assert_eq!(traj.grid(), g);
        return Ok(SchemeRun {
            report,
            trajectory: traj,
        });
    }
    unreachable!("the last halving always returns")
}

/// `max_t ‖∂_t U − F(U)‖₀` on about 50 sampled times, and the mass defect.
fn diagnostics(traj: &Trajectory, p: &EKParams) -> Result<(f64, f64)> {
    let g = traj.grid();
    let stride = (traj.len() / 50).max(1);
    let mut residual: f64 = 0.0;
    let mut mass: f64 = 0.0;
    for k in 0..traj.len() {
        let v = traj.state(k)?;
        mass = mass.max((mass_u(&v, p) - p.mbar()).abs());
        if k % stride == 0 || k + 1 == traj.len() {
            if let Some(dy) = traj.derivs.get(k) {
                let f = rhs_complex(&v, p)?.to_vec();
                let d: Vec<Complex64> = dy.iter().zip(&f).map(|(a, b)| a - b).collect();
                residual = residual.max(stacked_norm(g, &d, 0.0, false));
            }
        }
    }
    Ok((residual, mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ek::{CapillarityLaw, PotentialLaw, StateRP};
    use crate::field::{FieldFlags, FourierField};

    fn params() -> EKParams {
        EKParams::new(
            1.0,
            CapillarityLaw::Constant { k0: 1.0 },
            PotentialLaw::Linear { c: 1.0 },
            0.5,
            1.5,
            0.05,
        )
        .unwrap()
    }

    #[test]
    fn initial_flow_is_an_isometry() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let u0 = StateU::from_u(FourierField::single_mode(g, [1, 0], Complex64::new(0.3, 0.1)).unwrap());
        let tr = initial_flow(&u0, &p, &[0.0, 0.1, 0.7]);
        assert_eq!(tr.states[0], u0.to_vec());
        for s in [0.0, 0.6, 3.1] {
            let n0 = stacked_norm(g, &u0.to_vec(), s, false);
            for y in &tr.states {
                // unit phases are unit up to one rounding
                assert!((stacked_norm(g, y, s, false) - n0).abs() <= 4.0 * f64::EPSILON * n0);
            }
        }
        let i = g.mode_index([1, 0]).unwrap();
        let ph = tr.states[2][i] / u0.u.coeffs()[i];
        assert!((ph - Complex64::from_polar(1.0, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn zero_datum_is_a_fixed_point() {
        let g = TorusGrid::new(1, 16).unwrap();
        let p = params();
        let run = iterate(
            &StateU::zeros(g),
            &p,
            &FlowConfig::new(1e-3, 0.1),
            &SchemeConfig::default(),
            CutoffParams::default(),
        )
        .unwrap();
        assert!(run.report.converged);
        assert_eq!(run.report.n_iters, 1);
        assert_eq!(run.report.t_used, 0.1);
    }

    #[test]
    fn small_datum_contracts() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let s = StateRP::new(
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 0.05 * x[0].cos()),
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 0.05 * x[0].sin()),
        )
        .unwrap();
        let u0 = to_complex(&s, &p).unwrap();
        let run = iterate(
            &u0,
            &p,
            &FlowConfig::new(1e-3, 0.1),
            &SchemeConfig::default(),
            CutoffParams::default(),
        )
        .unwrap();
        let r = &run.report;
        assert!(r.converged, "{r:?}");
        assert!(r.contraction_factors.iter().all(|&q| q <= 0.6), "{:?}", r.contraction_factors);
        assert!(r.mass_defect <= 1e-12);
        assert!(r.residual <= 1e-6, "residual {}", r.residual);
    }
}
