//! Sampled trajectories of stacked `(u, ū)` coefficient vectors.

use num_complex::Complex64;

use crate::ek::StateU;
use crate::error::{Error, Result};
use crate::grid::{bracket, mode_norm, TorusGrid};

/// `‖(u, ū)‖_s` of a stacked vector; `homogeneous` switches to `|j|^s`
/// weights with the zero mode dropped.
pub fn stacked_norm(grid: TorusGrid, y: &[Complex64], s: f64, homogeneous: bool) -> f64 {
    let n = grid.num_modes();
    let z = grid.zero_index();
    y.iter()
        .enumerate()
        .map(|(i, c)| {
            let k = i % n;
            let j = grid.mode(k);
            let w = if homogeneous {
                if k == z {
                    0.0
                } else {
                    mode_norm(j).powf(2.0 * s)
                }
            } else {
                bracket(j).powf(2.0 * s)
            };
            c.norm_sqr() * w
        })
        .sum::<f64>()
        .sqrt()
}

/// Time samples with states and, when known, time derivatives.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: TorusGrid,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub derivs: Vec<Vec<Complex64>>,
}

impl Trajectory {
    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
        }
    }

    /// Samples `f(t) = (y, ẏ)` at the given times.
    pub fn from_fn(
        grid: TorusGrid,
        times: &[f64],
        f: impl Fn(f64) -> (Vec<Complex64>, Vec<Complex64>),
    ) -> Self {
        let mut t = Self::new(grid);
        for &s in times {
            let (y, dy) = f(s);
            t.push(s, y, Some(dy));
        }
        t
    }

    pub fn push(&mut self, t: f64, y: Vec<Complex64>, dy: Option<Vec<Complex64>>) {
        self.times.push(t);
        self.states.push(y);
        if let Some(d) = dy {
            self.derivs.push(d);
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn state(&self, k: usize) -> Result<StateU> {
        StateU::from_vec(self.grid, self.states[k].clone())
    }

    pub fn last(&self) -> Result<StateU> {
        self.state(self.len() - 1)
    }

    fn has_derivs(&self) -> bool {
        !self.derivs.is_empty() && self.derivs.len() == self.states.len()
    }

    /// State at time `t`: cubic Hermite between samples when derivatives
    /// are stored, linear otherwise. Times outside the sampled range clamp.
    pub fn at(&self, t: f64) -> Vec<Complex64> {
        let n = self.len();
        assert!(n > 0, "empty trajectory");
        if n == 1 || t <= self.times[0] {
            return self.states[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1].clone();
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        if s == 0.0 {
            return self.states[k].clone();
        }
        let (y0, y1) = (&self.states[k], &self.states[k + 1]);
        if self.has_derivs() {
            let (d0, d1) = (&self.derivs[k], &self.derivs[k + 1]);
            let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
            let h10 = s * (1.0 - s) * (1.0 - s) * h;
            let h01 = s * s * (3.0 - 2.0 * s);
            let h11 = s * s * (s - 1.0) * h;
            (0..y0.len())
                .map(|i| y0[i] * h00 + d0[i] * h10 + y1[i] * h01 + d1[i] * h11)
                .collect()
        } else {
            y0.iter().zip(y1).map(|(a, b)| a * (1.0 - s) + b * s).collect()
        }
    }

    pub fn state_at(&self, t: f64) -> Result<StateU> {
        StateU::from_vec(self.grid, self.at(t))
    }

    /// `max_k ‖y_k‖_s`.
    pub fn sup_norm(&self, s: f64, homogeneous: bool) -> f64 {
        self.states
            .iter()
            .map(|y| stacked_norm(self.grid, y, s, homogeneous))
            .fold(0.0, f64::max)
    }

    /// `max_k ‖y_k − z_k‖_s` over common sample times.
    pub fn sup_diff(&self, other: &Self, s: f64, homogeneous: bool) -> Result<f64> {
        if self.len() != other.len() || self.grid != other.grid {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| {
                let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                stacked_norm(self.grid, &d, s, homogeneous)
            })
            .fold(0.0, f64::max))
    }

    /// Keeps every `stride`-th sample and the last one.
    pub fn thinned(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let mut out = Self::new(self.grid);
        let n = self.len();
        for k in (0..n).filter(|k| k % stride == 0 || *k == n - 1) {
            let d = self.has_derivs().then(|| self.derivs[k].clone());
            out.push(self.times[k], self.states[k].clone(), d);
        }
        out
    }
}
