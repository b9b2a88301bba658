//! Modified energy `‖V‖²_{σ,U} = ⟨Op^BW(λ^σ|ξ|^{2σ}) W, W⟩`,
//! `W = Op^BW(F⁻¹) V`, and the ε-uniformity experiment for mollified flows.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::FlowConfig;
use super::generator::mollified_generator;
use super::linear::{solve_linear, FrozenProblem};
use super::trajectory::{stacked_norm, Trajectory};
use crate::calculus::{
    assemble_bony_weyl, assemble_bony_weyl_matrix, BlockOp, CutoffParams, MatrixSymbol, Multiplier, ParaOp,
    Regularity, Symbol,
};
use crate::ek::{diag_frame, EKParams, StateU};
use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};

/// The quadratic form of the modified energy at a frozen state `U`.
#[derive(Clone, Debug)]
pub struct EnergyForm {
    finv: BlockOp,
    weight: ParaOp,
}

impl EnergyForm {
    pub fn new(u: &StateU, p: &EKParams, sigma: f64, cutoff: CutoffParams) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma = {sigma} must be >= 0")));
        }
        let fr = diag_frame(u, p)?;
        let grid = u.grid();
        let reg = Regularity::Holder(2.0);
        let f = Symbol::function(&fr.f, reg);
        let g = Symbol::function(&fr.g_entry.scale(-1.0), reg);
        let finv = assemble_bony_weyl_matrix(
            &MatrixSymbol {
                entries: [[Some(f.clone()), Some(g.clone())], [Some(g), Some(f)]],
            },
            cutoff,
        )?;
        let lam_s: Vec<f64> = fr.lambda_vals.iter().map(|l| l.powf(sigma)).collect();
        let lam_s = FourierField::from_real_values(grid, &lam_s, FieldFlags::REAL)?;
        let weight = assemble_bony_weyl(
            &Symbol::product_form(&lam_s, Multiplier::abs_pow(2.0 * sigma), 2.0 * sigma, reg),
            cutoff,
        )?;
        Ok(Self { finv, weight })
    }

    /// `2 Re Σ_j (Op(λ^σ|ξ|^{2σ}) w)_j conj(w_j)` with `w` the first
    /// component of `Op^BW(F⁻¹) V`.
    pub fn eval(&self, v: &[Complex64]) -> Result<f64> {
        let n = v.len() / 2;
        let [w, _] = self.finv.apply(&v[..n], &v[n..])?;
        let z = self.weight.apply_coeffs(&w)?;
        Ok(2.0 * z.iter().zip(&w).map(|(a, b)| (a * b.conj()).re).sum::<f64>())
    }
}

/// `‖V‖²_{σ,U}`.
pub fn modified_energy(v: &StateU, u: &StateU, p: &EKParams, sigma: f64, cutoff: CutoffParams) -> Result<f64> {
    EnergyForm::new(u, p, sigma, cutoff)?.eval(&v.to_vec())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub norm_sigma: f64,
    pub modified_energy: f64,
}

/// `(t, ‖V‖_σ, ‖V‖²_{σ,U})` along one trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyProbe {
    pub sigma: f64,
    pub eps: Option<f64>,
    pub samples: Vec<EnergySample>,
}

impl EnergyProbe {
    pub fn record(traj: &Trajectory, form: &EnergyForm, sigma: f64, eps: Option<f64>) -> Result<Self> {
        let samples = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, y)| {
                Ok(EnergySample {
                    t,
                    norm_sigma: stacked_norm(traj.grid(), y, sigma, true),
                    modified_energy: form.eval(y)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { sigma, eps, samples })
    }

    /// Largest `|d/dt ‖V‖²_{σ,U}| / ‖V‖²_σ` by finite differences.
    pub fn drift_rate(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let de = (w[1].modified_energy - w[0].modified_energy) / (w[1].t - w[0].t);
                let n2 = w[0].norm_sigma.max(w[1].norm_sigma).powi(2);
                if n2 == 0.0 {
                    0.0
                } else {
                    de.abs() / n2
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub eps: f64,
    /// `sup_t ‖V^ε(t)‖_σ / ‖V₀‖_σ`
    pub ratio: f64,
    /// `sup_t ‖V^ε(t) − V^{ε/2}(t)‖_σ`
    pub cauchy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTable {
    pub sigma: f64,
    pub rows: Vec<GrowthRow>,
    #[serde(skip)]
    pub probes: Vec<EnergyProbe>,
}

impl GrowthTable {
    /// `max ratio / min ratio`.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
        hi / lo
    }

    /// Cauchy differences strictly decrease along the ε list.
    pub fn cauchy_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].cauchy < w[0].cauchy)
    }
}

/// Runs the mollified flow with frozen coefficients `U` for every `ε` and
/// `ε/2`, reporting growth ratios and Cauchy differences.
pub fn energy_growth_probe(
    u: &StateU,
    p: &EKParams,
    v0: &StateU,
    cfg: &FlowConfig,
    sigma: f64,
    eps_list: &[f64],
    cutoff: CutoffParams,
) -> Result<GrowthTable> {
    let n0 = stacked_norm(v0.grid(), &v0.to_vec(), sigma, true);
    if n0 == 0.0 {
        return Err(Error::Domain("initial datum has zero sigma-norm".into()));
    }
    let form = EnergyForm::new(u, p, sigma, cutoff)?;
    let runs: Vec<f64> = eps_list.iter().flat_map(|&e| [e, 0.5 * e]).collect();
    let trajs: Vec<Trajectory> = runs
        .par_iter()
        .map(|&e| {
            let op = mollified_generator(u, p, Some(e), cutoff)?;
            solve_linear(&FrozenProblem::new(op, None)?, v0, &cfg.with_flow_eps(Some(e)))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut probes = Vec::new();
    for (i, &eps) in eps_list.iter().enumerate() {
        let (a, b) = (&trajs[2 * i], &trajs[2 * i + 1]);
        rows.push(GrowthRow {
            eps,
            ratio: a.sup_norm(sigma, true) / n0,
            cauchy: a.sup_diff(b, sigma, true)?,
        });
        probes.push(EnergyProbe::record(a, &form, sigma, Some(eps))?);
    }
    Ok(GrowthTable { sigma, rows, probes })
}

/// CSV with columns `t,sigma,norm_sigma,modified_energy,eps`; `eps` is
/// empty for unmollified runs.
pub fn write_energy_csv(path: &Path, probes: &[EnergyProbe]) -> Result<()> {
    let mut out = String::from("t,sigma,norm_sigma,modified_energy,eps\n");
    for pr in probes {
        let eps = pr.eps.map(|e| format!("{e:e}")).unwrap_or_default();
        for s in &pr.samples {
            out.push_str(&format!(
                "{:.12e},{},{:.12e},{:.12e},{}\n",
                s.t, pr.sigma, s.norm_sigma, s.modified_energy, eps
            ));
        }
    }
    std::fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}
