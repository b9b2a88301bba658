//! Method-of-lines reference solver: RK4 on the pseudospectral vector
//! field with step halving until successive runs agree.

use serde::Serialize;

use crate::calculus::CutoffParams;
use crate::ek::{ek_rhs_exact, generator, to_complex, EKParams, StateRP};
use crate::error::{Error, Result};
use crate::flow::Trajectory;

fn lost(t: f64, e: Error) -> Error {
    match e {
        Error::Inadmissible { .. } => Error::AdmissibilityLost {
            t,
            reason: e.to_string(),
        },
        other => other,
    }
}

/// Largest step allowed by `dt · (row-sum bound of the generator at s0) <= margin`.
pub fn stable_dt(s0: &StateRP, p: &EKParams, cutoff: CutoffParams, margin: f64) -> Result<f64> {
    let bound = generator(&to_complex(s0, p)?, p, cutoff)?.radius_bound();
    Ok(if bound > 0.0 { margin / bound } else { f64::INFINITY })
}

/// Fixed-step RK4 for `∂_t s = direction · F(s)` on `[0, t_end]`, stored in
/// complex coordinates with time derivatives.
pub fn integrate_rk4(s0: &StateRP, p: &EKParams, dt: f64, t_end: f64, direction: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(Error::Parameter(format!("need dt > 0 and T >= 0, got dt = {dt}, T = {t_end}")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let f = |s: &StateRP, t: f64| -> Result<StateRP> { Ok(ek_rhs_exact(s, p).map_err(|e| lost(t, e))?.scale(direction)) };
    let mut traj = Trajectory::new(s0.grid());
    let mut y = s0.clone();
    let mut t = 0.0;
    for step in 0..steps {
        let k1 = f(&y, t)?;
        let k2 = f(&y.add(&k1.scale(0.5 * h))?, t + 0.5 * h)?;
        let k3 = f(&y.add(&k2.scale(0.5 * h))?, t + 0.5 * h)?;
        let k4 = f(&y.add(&k3.scale(h))?, t + h)?;
        let incr = k1.add(&k2.scale(2.0))?.add(&k3.scale(2.0))?.add(&k4)?.scale(h / 6.0);
        let next = y.add(&incr)?;
        traj.push(t, to_complex(&y, p)?.to_vec(), Some(to_complex(&k1, p)?.to_vec()));
        y = next;
        t = (step + 1) as f64 * h;
    }
    let dy = f(&y, t)?;
    traj.push(t, to_complex(&y, p)?.to_vec(), Some(to_complex(&dy, p)?.to_vec()));
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    /// Finest accepted run.
    pub traj: Trajectory,
    pub dt: f64,
    pub refinements: usize,
    /// `sup_t ‖y_{dt} − y_{dt/2}‖_{s0}` of the last comparison.
    pub last_change: f64,
    /// Successive changes, coarsest first.
    pub changes: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceConfig {
    pub dt: f64,
    pub t_end: f64,
    pub tol_ref: f64,
    pub s0: f64,
    pub max_refinements: usize,
    /// `+1` forward, `-1` backward in time.
    pub direction: f64,
}

/// Halves `dt` until two successive runs differ by at most `tol_ref` in
/// `L^∞_T H^{s0}` on the coarse sample times.
pub fn reference_solve(s0: &StateRP, p: &EKParams, cfg: &ReferenceConfig) -> Result<ReferenceSolution> {
    let mut dt = cfg.dt;
    let mut coarse = integrate_rk4(s0, p, dt, cfg.t_end, cfg.direction)?;
    let mut changes = Vec::new();
    for k in 1..=cfg.max_refinements {
        dt *= 0.5;
        let fine = integrate_rk4(s0, p, dt, cfg.t_end, cfg.direction)?;
        let change = coarse.sup_diff(&fine.thinned(2), cfg.s0, false)?;
        changes.push(change);
        coarse = fine;
        if change <= cfg.tol_ref {
            return Ok(ReferenceSolution {
                traj: coarse,
                dt,
                refinements: k,
                last_change: change,
                changes,
            });
        }
    }
    Err(Error::Parameter(format!(
        "reference solver did not reach tol_ref = {} after {} refinements (last change {:e})",
        cfg.tol_ref,
        cfg.max_refinements,
        changes.last().copied().unwrap_or(f64::NAN)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ek::{mass_u, CapillarityLaw, PotentialLaw};
    use crate::field::{FieldFlags, FourierField};
    use crate::grid::TorusGrid;

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

    fn standard(g: TorusGrid, a: f64) -> StateRP {
        StateRP::new(
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| a * x[0].cos()),
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| a * x[0].sin()),
        )
        .unwrap()
    }

    #[test]
    fn linear_regime_frequency() {
        // ω² = m̄K(m̄) + m̄ g′(m̄) at |k| = 1 for the linearized system
        let g = TorusGrid::new(1, 16).unwrap();
        let p = params();
        let a = 1e-5;
        let s0 = StateRP::new(
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| a * x[0].cos()),
            FourierField::zeros(g),
        )
        .unwrap();
        let omega = (p.mbar() * p.kbar() + p.mbar() * p.g_prime(p.mbar())).sqrt();
        let t_end = 1.0;
        let tr = integrate_rk4(&s0, &p, 1e-3, t_end, 1.0).unwrap();
        let rho = crate::ek::from_complex(&tr.last().unwrap(), &p).unwrap().rho;
        let c1 = rho.coeff([1, 0]).re;
        let expect = 0.5 * a * (omega * t_end).cos();
        assert!((c1 - expect).abs() < 1e-4 * a, "{c1} vs {expect}");
    }

    #[test]
    fn fourth_order_and_mass() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let s0 = standard(g, 0.1);
        let t_end = 0.05;
        let fine = integrate_rk4(&s0, &p, 2.5e-4, t_end, 1.0).unwrap();
        let end = |dt: f64| integrate_rk4(&s0, &p, dt, t_end, 1.0).unwrap().last().unwrap();
        let truth = fine.last().unwrap();
        let e1 = end(2e-3).sub(&truth).unwrap().norm(0.6);
        let e2 = end(1e-3).sub(&truth).unwrap().norm(0.6);
        let rate = e1 / e2;
        assert!(rate > 12.0 && rate < 20.0, "rate {rate}");
        for k in 0..fine.len() {
            assert!((mass_u(&fine.state(k).unwrap(), &p) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn refinement_reaches_tolerance() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let s0 = standard(g, 0.1);
        let dt = stable_dt(&s0, &p, CutoffParams::default(), 0.4).unwrap();
        let sol = reference_solve(
            &s0,
            &p,
            &ReferenceConfig {
                dt,
                t_end: 0.05,
                tol_ref: 1e-10,
                s0: 0.6,
                max_refinements: 8,
                direction: 1.0,
            },
        )
        .unwrap();
        assert!(sol.last_change <= 1e-10);
        assert!(sol.traj.t_end() == 0.05);
    }

    #[test]
    fn admissibility_loss_reports_time() {
        let g = TorusGrid::new(1, 16).unwrap();
        let p = params();
        // large outgoing velocity empties the trough
        let s0 = StateRP::new(
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 0.4 * x[0].cos()),
            FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| -3.0 * x[0].cos()),
        )
        .unwrap();
        match integrate_rk4(&s0, &p, 1e-4, 1.0, 1.0) {
            Err(Error::AdmissibilityLost { t, .. }) => assert!(t > 0.0 && t < 1.0),
            other => panic!("unexpected {:?}", other.map(|t| t.len())),
        }
    }
}
