//! Time integration of `∂_t V = G(t) V + f(t)` on stacked `(v, v̄)`
//! coefficients.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::config::{FlowConfig, Integrator};
use super::trajectory::Trajectory;
use crate::calculus::BlockOp;
use crate::ek::StateU;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Generator and optional forcing, held fixed between refreshes.
#[derive(Clone, Debug)]
pub struct Frozen {
    pub op: BlockOp,
    pub forcing: Option<Vec<Complex64>>,
}

impl Frozen {
    pub fn eval(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = y.len() / 2;
        let [a, b] = self.op.apply(&y[..n], &y[n..])?;
        let mut out = a;
        out.extend(b);
        if let Some(f) = &self.forcing {
            out.iter_mut().zip(f).for_each(|(o, x)| *o += x);
        }
        Ok(out)
    }
}

/// Source of frozen coefficients along `[0, T]`.
pub trait LinearProblem: Sync {
    fn grid(&self) -> TorusGrid;
    fn frozen(&self, t: f64) -> Result<Arc<Frozen>>;
    /// `false` lets the solver assemble once.
    fn time_dependent(&self) -> bool {
        true
    }
}

/// Time-independent problem.
pub struct FrozenProblem {
    grid: TorusGrid,
    frozen: Arc<Frozen>,
}

impl FrozenProblem {
    pub fn new(op: BlockOp, forcing: Option<Vec<Complex64>>) -> Result<Self> {
        let grid = op
            .grid()
            .ok_or_else(|| Error::Parameter("generator has no blocks".into()))?;
        Ok(Self {
            grid,
            frozen: Arc::new(Frozen { op, forcing }),
        })
    }
}

impl LinearProblem for FrozenProblem {
    fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn frozen(&self, _t: f64) -> Result<Arc<Frozen>> {
        Ok(self.frozen.clone())
    }

    fn time_dependent(&self) -> bool {
        false
    }
}

fn admissibility(t: f64, e: Error) -> Error {
    match e {
        Error::Inadmissible { .. } | Error::Radicand { .. } => Error::AdmissibilityLost {
            t,
            reason: e.to_string(),
        },
        other => other,
    }
}

struct Coefficients<'a> {
    problem: &'a dyn LinearProblem,
    refresh: Option<f64>,
    check: Option<f64>,
    cached: Option<(f64, Arc<Frozen>)>,
}

impl Coefficients<'_> {
    fn at(&mut self, t: f64) -> Result<Arc<Frozen>> {
        let key = match (self.problem.time_dependent(), self.refresh) {
            (false, _) => 0.0,
            (true, Some(h)) => (t / h + 1e-9).floor() * h,
            (true, None) => t,
        };
        if let Some((k, f)) = &self.cached {
            if *k == key {
                return Ok(f.clone());
            }
        }
        let f = self.problem.frozen(key).map_err(|e| admissibility(t, e))?;
        if let Some(dt) = self.check {
            let bound = f.op.radius_bound();
            if dt * bound > 0.5 {
                return Err(Error::StepTooLarge { dt, bound });
            }
        }
        self.cached = Some((key, f.clone()));
        Ok(f)
    }
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(p, q)| p + q * a).collect()
}

/// Integrates from `V(0) = v0` to `T`, storing every step and the time
/// derivative at each stored time.
pub fn solve_linear(problem: &dyn LinearProblem, v0: &StateU, cfg: &FlowConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = problem.grid();
    if v0.grid() != grid {
        return Err(Error::GridMismatch {
            left: grid.to_string(),
            right: v0.grid().to_string(),
        });
    }
    let (steps, h) = cfg.steps();
    let mut coeffs = Coefficients {
        problem,
        refresh: cfg.refresh_interval(),
        check: (cfg.integrator == Integrator::Rk4Fixed).then_some(h),
        cached: None,
    };
    let mut traj = Trajectory::new(grid);
    let mut y = v0.to_vec();
    let mut t = 0.0;
    let mut lu: Option<(f64, nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>)> = None;
    for step in 0..steps {
        let k1 = coeffs.at(t)?.eval(&y)?;
        let next = match cfg.integrator {
            Integrator::Rk4Fixed => {
                let k2 = coeffs.at(t + 0.5 * h)?.eval(&axpy(&y, 0.5 * h, &k1))?;
                let k3 = coeffs.at(t + 0.5 * h)?.eval(&axpy(&y, 0.5 * h, &k2))?;
                let k4 = coeffs.at(t + h)?.eval(&axpy(&y, h, &k3))?;
                (0..y.len())
                    .map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
                    .collect()
            }
            Integrator::MidpointImplicit => {
                let tm = t + 0.5 * h;
                let fz = coeffs.at(tm)?;
                let key = coeffs.cached.as_ref().map_or(tm, |c| c.0);
                if lu.as_ref().is_none_or(|(k, _)| *k != key) {
                    let dense = fz.op.to_dense(grid.num_modes());
                    let m = dense.len();
                    let a = DMatrix::from_fn(m, m, |r, c| {
                        let id = if r == c { 1.0 } else { 0.0 };
                        Complex64::new(id, 0.0) - dense[r][c] * (0.5 * h)
                    });
                    lu = Some((key, a.lu()));
                }
                // (I − h/2 G) y₁ = y + h/2 G y + h f
                let gy = Frozen {
                    op: fz.op.clone(),
                    forcing: None,
                }
                .eval(&y)?;
                let mut rhs = axpy(&y, 0.5 * h, &gy);
                if let Some(f) = &fz.forcing {
                    rhs = axpy(&rhs, h, f);
                }
                let sol = lu
                    .as_ref()
                    .expect("factorized above")
                    .1
                    .solve(&DVector::from_vec(rhs))
                    .ok_or_else(|| Error::Parameter(format!("singular implicit system at t = {t}")))?;
                sol.iter().copied().collect()
            }
        };
        traj.push(t, std::mem::replace(&mut y, next), Some(k1));
        t = (step + 1) as f64 * h;
    }
    let dy = coeffs.at(t)?.eval(&y)?;
    traj.push(t, y, Some(dy));
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{assemble_bony_weyl_matrix, CutoffParams};
    use crate::ek::{generator, CapillarityLaw, EKParams, PotentialLaw};
    use crate::field::{FieldFlags, FourierField};
    use crate::sampling::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> EKParams {
        EKParams::new(
            1.5,
            CapillarityLaw::Constant { k0: 0.6 },
            PotentialLaw::Linear { c: 1.0 },
            0.3,
            3.0,
            0.05,
        )
        .unwrap()
    }

    fn free_problem(g: TorusGrid, p: &EKParams) -> FrozenProblem {
        FrozenProblem::new(generator(&StateU::zeros(g), p, CutoffParams::default()).unwrap(), None).unwrap()
    }

    fn exact_free(v0: &StateU, p: &EKParams, t: f64) -> Vec<Complex64> {
        let w = p.dispersion();
        let ph = |j: [i64; 2], s: f64| Complex64::from_polar(1.0, s * w * (j[0] * j[0] + j[1] * j[1]) as f64 * t);
        let u = v0.u.map_modes(|j| ph(j, -1.0));
        let ub = v0.ubar.map_modes(|j| ph(j, 1.0));
        let mut y = u.coeffs().to_vec();
        y.extend_from_slice(ub.coeffs());
        y
    }

    #[test]
    fn free_flow_matches_oscillators() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = TorusGrid::new(1, 32).unwrap();
        let p = params();
        let v0 = StateU::from_u(random_field(&mut rng, g, 3.0, FieldFlags::COMPLEX));
        let prob = free_problem(g, &p);
        let cfg = FlowConfig::new(2e-4, 0.05);
        let tr = solve_linear(&prob, &v0, &cfg).unwrap();
        let exact = exact_free(&v0, &p, 0.05);
        let err = stacked_diff(g, tr.states.last().unwrap(), &exact);
        assert!(err <= cfg.tol, "rk4 error {err}");
        // isometry of every norm
        for s in [0.0, 1.0, 2.5] {
            let n0 = v0.norm(s);
            let n1 = tr.last().unwrap().norm(s);
            assert!((n1 - n0).abs() <= 1e-9 * n0);
        }
        let mid = FlowConfig {
            integrator: Integrator::MidpointImplicit,
            ..cfg.with_dt(1e-4)
        };
        let tm = solve_linear(&prob, &v0, &mid).unwrap();
        let err_m = stacked_diff(g, tm.states.last().unwrap(), &exact);
        assert!(err_m <= 1e-2, "midpoint error {err_m}");
        let nm = tm.last().unwrap().norm(1.0);
        assert!((nm - v0.norm(1.0)).abs() <= 1e-12 * nm);
    }

    fn stacked_diff(g: TorusGrid, a: &[Complex64], b: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        crate::flow::stacked_norm(g, &d, 0.0, false)
    }

    #[test]
    fn constant_forcing_matches_duhamel_integral() {
        // v(t) = Σ_j (e^{μ_j t} − 1)/μ_j f_j for the diagonal generator
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = TorusGrid::new(1, 16).unwrap();
        let p = params();
        let f = StateU::from_u(random_field(&mut rng, g, 2.0, FieldFlags::COMPLEX).project_zero_mean()).to_vec();
        let op = generator(&StateU::zeros(g), &p, CutoffParams::default()).unwrap();
        let prob = FrozenProblem::new(op.clone(), Some(f.clone())).unwrap();
        let cfg = FlowConfig::new(1e-3, 0.2);
        let tr = solve_linear(&prob, &StateU::zeros(g), &cfg).unwrap();
        let n = g.num_modes();
        let exact: Vec<Complex64> = (0..2 * n)
            .map(|i| {
                let blk = op.blocks[i / n][i / n].as_ref().unwrap();
                let j = g.mode(i % n);
                let mu = blk.entry(j, j);
                if mu.norm() == 0.0 {
                    f[i] * 0.2
                } else {
                    ((mu * 0.2).exp() - 1.0) / mu * f[i]
                }
            })
            .collect();
        let coarse = stacked_diff(g, tr.states.last().unwrap(), &exact);
        let fine = solve_linear(&prob, &StateU::zeros(g), &cfg.with_dt(5e-4)).unwrap();
        let fine_err = stacked_diff(g, fine.states.last().unwrap(), &exact);
        assert!(coarse < 1e-7 && fine_err < coarse / 10.0, "{coarse} {fine_err}");
    }

    #[test]
    fn step_guard_and_admissibility() {
        let g = TorusGrid::new(1, 64).unwrap();
        let p = params();
        let prob = free_problem(g, &p);
        let v0 = StateU::zeros(g);
        assert!(matches!(
            solve_linear(&prob, &v0, &FlowConfig::new(1e-2, 0.1)),
            Err(Error::StepTooLarge { .. })
        ));

        struct Leaving(EKParams);
        impl LinearProblem for Leaving {
            fn grid(&self) -> TorusGrid {
                TorusGrid::new(1, 16).unwrap()
            }
            fn frozen(&self, t: f64) -> Result<Arc<Frozen>> {
                let g = self.grid();
                let rho = FourierField::from_fn(g, FieldFlags::REAL_ZERO_MEAN, |x| 20.0 * t * x[0].cos());
                let u = crate::ek::to_complex(&crate::ek::StateRP::new(rho, FourierField::zeros(g))?, &self.0)?;
                let c = crate::ek::paralin::coefficient_fields(&u, &self.0)?;
                let a = crate::ek::paralin::full_symbol(&c, &self.0)?;
                Ok(Arc::new(Frozen {
                    op: assemble_bony_weyl_matrix(&a, CutoffParams::default())?,
                    forcing: None,
                }))
            }
        }
        let g16 = TorusGrid::new(1, 16).unwrap();
        match solve_linear(&Leaving(params()), &StateU::zeros(g16), &FlowConfig::new(1e-4, 0.1)) {
            Err(Error::AdmissibilityLost { t, .. }) => assert!(t > 0.05 && t < 0.1, "t = {t}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
