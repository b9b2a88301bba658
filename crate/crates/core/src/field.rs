//! Truncated Fourier fields on the torus.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::cutoff::chi_radial;
use crate::error::{Error, Result};
use crate::grid::{mode_norm, Mode, TorusGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFlags {
    pub real: bool,
    pub zero_mean: bool,
}

impl FieldFlags {
    pub const COMPLEX: Self = Self {
        real: false,
        zero_mean: false,
    };
    pub const REAL: Self = Self {
        real: true,
        zero_mean: false,
    };
    pub const REAL_ZERO_MEAN: Self = Self {
        real: true,
        zero_mean: true,
    };
}

/// Coefficients `u_j`, `j` in the grid's mode set, of
/// `u(x) = Σ u_j e^{i j·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    flags: FieldFlags,
}

impl FourierField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.num_modes()],
            flags: FieldFlags::REAL_ZERO_MEAN,
        }
    }

    /// Builds a field, enforcing the flags: real fields are symmetrized so
    /// that `u_{-j} = conj(u_j)` holds bit for bit, zero-mean fields get
    /// `u_0 = 0`.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>, flags: FieldFlags) -> Result<Self> {
        if coeffs.len() != grid.num_modes() {
            return Err(Error::SizeMismatch {
                expected: grid.num_modes(),
                found: coeffs.len(),
            });
        }
        let mut f = Self {
            grid,
            coeffs,
            flags,
        };
        f.enforce_flags();
        Ok(f)
    }

    fn enforce_flags(&mut self) {
        if self.flags.real {
            let n = self.coeffs.len();
            for i in 0..=n / 2 {
                let k = n - 1 - i;
                let avg = 0.5 * (self.coeffs[i] + self.coeffs[k].conj());
                self.coeffs[i] = avg;
                self.coeffs[k] = avg.conj();
            }
        }
        if self.flags.zero_mean {
            let z = self.grid.zero_index();
            self.coeffs[z] = ZERO;
        }
    }

    pub fn from_values(grid: TorusGrid, values: &[Complex64], flags: FieldFlags) -> Result<Self> {
        let c = grid.forward(values)?;
        Self::from_coeffs(grid, c, flags)
    }

    pub fn from_real_values(grid: TorusGrid, values: &[f64], flags: FieldFlags) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_values(
            grid,
            &v,
            FieldFlags {
                real: true,
                ..flags
            },
        )
    }

    /// Samples a real function on the grid.
    pub fn from_fn(grid: TorusGrid, flags: FieldFlags, f: impl Fn([f64; 2]) -> f64) -> Self {
        let v: Vec<f64> = (0..grid.num_points()).map(|i| f(grid.point(i))).collect();
        Self::from_real_values(grid, &v, flags).expect("sizes agree by construction")
    }

    /// `amp · e^{i j·x}` (complex flag).
    pub fn single_mode(grid: TorusGrid, j: Mode, amp: Complex64) -> Result<Self> {
        let idx = grid
            .mode_index(j)
            .ok_or_else(|| Error::Domain(format!("mode {j:?} outside the grid's mode set")))?;
        let mut c = vec![ZERO; grid.num_modes()];
        c[idx] = amp;
        Self::from_coeffs(grid, c, FieldFlags::COMPLEX)
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        let mut coeffs = vec![ZERO; grid.num_modes()];
        coeffs[grid.zero_index()] = Complex64::new(c, 0.0);
        Self {
            grid,
            coeffs,
            flags: FieldFlags::REAL,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn flags(&self) -> FieldFlags {
        self.flags
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `u_j`, zero for modes outside the mode set.
    pub fn coeff(&self, j: Mode) -> Complex64 {
        self.grid.mode_index(j).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn with_flags(mut self, flags: FieldFlags) -> Self {
        self.flags = flags;
        self.enforce_flags();
        self
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.grid.inverse(&self.coeffs).expect("coefficient length checked")
    }

    /// Real parts of the grid values.
    pub fn real_values(&self) -> Vec<f64> {
        self.values().into_iter().map(|z| z.re).collect()
    }

    /// Grid values on the 3/2-padded grid.
    pub fn padded_values(&self) -> Vec<Complex64> {
        self.grid
            .inverse_on(self.grid.padded_n_ax(), &self.coeffs)
            .expect("coefficient length checked")
    }

    /// Largest grid value modulus.
    pub fn sup(&self) -> f64 {
        self.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(*a, *b))
            .collect();
        let flags = FieldFlags {
            real: self.flags.real && other.flags.real,
            zero_mean: self.flags.zero_mean && other.flags.zero_mean,
        };
        Ok(Self {
            grid: self.grid,
            coeffs,
            flags,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            flags: self.flags,
        }
    }

    /// Multiplication by a complex scalar; drops the real flag.
    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            flags: FieldFlags {
                real: self.flags.real && s.im == 0.0,
                ..self.flags
            },
        }
    }

    /// The field `conj(u(x))`, i.e. coefficients `conj(u_{-j})`.
    pub fn conj(&self) -> Self {
        let n = self.coeffs.len();
        Self {
            grid: self.grid,
            coeffs: (0..n).map(|i| self.coeffs[n - 1 - i].conj()).collect(),
            flags: self.flags,
        }
    }

    /// The field `u(-x)`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            grid: self.grid,
            coeffs,
            flags: self.flags,
        }
    }

    /// Applies a Fourier multiplier `m(j)`.
    pub fn map_modes(&self, m: impl Fn(Mode) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * m(self.grid.mode(i)))
                .collect(),
            flags: FieldFlags {
                real: false,
                zero_mean: self.flags.zero_mean,
            },
        }
    }

    fn filter(&self, keep: impl Fn(Mode) -> f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * keep(self.grid.mode(i)))
                .collect(),
            flags: self.flags,
        }
    }

    /// `Π₀^⊥`.
    pub fn project_zero_mean(&self) -> Self {
        let mut f = self.clone();
        f.coeffs[self.grid.zero_index()] = ZERO;
        f.flags.zero_mean = true;
        f
    }

    /// `Π_N`: keeps `1 <= |j| <= N`.
    pub fn project_low(&self, n: f64) -> Self {
        let mut f = self.filter(|j| if mode_norm(j) <= n { 1.0 } else { 0.0 });
        f.coeffs[self.grid.zero_index()] = ZERO;
        f.flags.zero_mean = true;
        f
    }

    /// Littlewood–Paley block `Δ_k`.
    pub fn lp_block(&self, k: u32) -> Self {
        self.filter(|j| lp_weight(k, mode_norm(j)))
    }

    /// Low-pass `S_k = χ(2^{-k} D)`.
    pub fn lp_partial(&self, k: u32) -> Self {
        let scale = 2f64.powi(k as i32);
        self.filter(|j| chi_radial(mode_norm(j) / scale))
    }

    /// Partial-derivative `∂_{x_r}`.
    pub fn partial(&self, r: usize) -> Self {
        let mut f = self.map_modes(|j| Complex64::new(0.0, j[r] as f64));
        f.flags = FieldFlags {
            real: self.flags.real,
            zero_mean: true,
        };
        f
    }

    /// Pointwise product computed on the 3/2-padded grid, so that every
    /// product mode landing in the mode set is alias-free.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let m = self.grid.padded_n_ax();
        let a = self.padded_values();
        let b = other.padded_values();
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let c = self.grid.forward_on(m, &prod)?;
        let real = self.flags.real && other.flags.real;
        Self::from_coeffs(
            self.grid,
            c,
            FieldFlags {
                real,
                zero_mean: false,
            },
        )
    }

    /// Pointwise map evaluated on the padded grid.
    pub fn map_padded(&self, flags: FieldFlags, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = self.grid.padded_n_ax();
        let v: Vec<Complex64> = self.padded_values().into_iter().map(f).collect();
        let c = self.grid.forward_on(m, &v).expect("padded sizes agree");
        Self::from_coeffs(self.grid, c, flags).expect("mode-set length")
    }

    /// Pointwise real map on the native grid.
    pub fn map_real(&self, flags: FieldFlags, f: impl Fn(f64) -> f64) -> Self {
        let v: Vec<f64> = self.real_values().into_iter().map(f).collect();
        Self::from_real_values(self.grid, &v, flags).expect("native sizes agree")
    }

    /// `Σ_j u_j conj(v_j)`, the normalized `L²` pairing.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Largest deviation from conjugate symmetry, relative to the largest coefficient.
    pub fn conj_symmetry_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| (self.coeffs[i] - self.coeffs[n - 1 - i].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_snapshot(&self) -> String {
        let mut s = format!(
            "{{\"d\":{},\"N_ax\":{},\"flags\":{{\"real\":{},\"zero_mean\":{}}},\"coeffs\":[",
            self.grid.dim(),
            self.grid.n_ax(),
            self.flags.real,
            self.flags.zero_mean
        );
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("[{:.16e},{:.16e}]", c.re, c.im));
        }
        s.push_str("]}");
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Snap {
            d: usize,
            #[serde(rename = "N_ax")]
            n_ax: usize,
            flags: FieldFlags,
            coeffs: Vec<[f64; 2]>,
        }
        let s: Snap = serde_json::from_str(text)?;
        let grid = TorusGrid::new(s.d, s.n_ax)?;
        if s.coeffs.len() != grid.num_modes() {
            return Err(Error::Format(format!(
                "{} coefficients for a grid with {} modes",
                s.coeffs.len(),
                grid.num_modes()
            )));
        }
        // flags are trusted as written; no re-symmetrization on load
        Ok(Self {
            grid,
            coeffs: s.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
            flags: s.flags,
        })
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_snapshot())?;
        Ok(())
    }

    pub fn read_snapshot(path: &Path) -> Result<Self> {
        Self::from_snapshot(&fs::read_to_string(path)?)
    }
}

/// Weight of `Δ_k` at radius `r`.
pub fn lp_weight(k: u32, r: f64) -> f64 {
    let hi = chi_radial(r / 2f64.powi(k as i32));
    if k == 0 {
        hi
    } else {
        hi - chi_radial(r / 2f64.powi(k as i32 - 1))
    }
}

/// Number of dyadic blocks needed so that `Σ_{k <= K} Δ_k = 1` on the mode set.
pub fn lp_top_level(grid: TorusGrid) -> u32 {
    let rmax = grid.kmax() as f64 * (grid.dim() as f64).sqrt();
    let mut k = 0;
    while 1.1 * 2f64.powi(k as i32) < rmax {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(grid: TorusGrid, vals: &[Complex64]) -> Vec<Complex64> {
        let np = grid.num_points() as f64;
        grid.modes()
            .map(|j| {
                let mut acc = ZERO;
                for (p, v) in vals.iter().enumerate() {
                    let x = grid.point(p);
                    let ph = -(j[0] as f64 * x[0] + j[1] as f64 * x[1]);
                    acc += v * Complex64::from_polar(1.0, ph);
                }
                acc / np
            })
            .collect()
    }

    #[test]
    fn forward_matches_naive_dft_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(d, n) in &[(1, 32), (2, 8)] {
            let g = TorusGrid::new(d, n).unwrap();
            let u = random_field(&mut rng, g, 1.0, FieldFlags::REAL);
            let vals = u.values();
            let fast = g.forward(&vals).unwrap();
            let slow = naive_dft(g, &vals);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-13);
            }
            let back = FourierField::from_values(g, &vals, FieldFlags::REAL).unwrap();
            assert!(back.max_abs_diff(&u) < 1e-13);
        }
    }

    #[test]
    fn real_flag_gives_exact_conjugate_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = TorusGrid::new(2, 16).unwrap();
        let u = random_field(&mut rng, g, 0.5, FieldFlags::REAL_ZERO_MEAN);
        assert_eq!(u.conj_symmetry_defect(), 0.0);
        assert_eq!(u.coeff([0, 0]), ZERO);
        for v in u.values() {
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn projectors() {
        let g = TorusGrid::new(1, 32).unwrap();
        let one_plus = FourierField::from_fn(g, FieldFlags::REAL, |x| 1.0 + x[0].cos());
        let p = one_plus.project_zero_mean();
        let cos = FourierField::from_fn(g, FieldFlags::REAL, |x| x[0].cos());
        assert!(p.max_abs_diff(&cos) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_field(&mut rng, g, 0.0, FieldFlags::REAL);
        let pu = u.project_low(5.0);
        assert_eq!(pu.project_low(5.0), pu);
        for j in g.modes() {
            if j[0] == 0 || j[0].abs() > 5 {
                assert_eq!(pu.coeff(j), ZERO);
            }
        }
    }

    #[test]
    fn lp_blocks_telescope() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(d, n) in &[(1, 64), (2, 16)] {
            let g = TorusGrid::new(d, n).unwrap();
            let u = random_field(&mut rng, g, 0.0, FieldFlags::COMPLEX);
            let top = lp_top_level(g);
            let mut acc = FourierField::zeros(g);
            for k in 0..=top {
                acc = acc.add(&u.lp_block(k)).unwrap();
            }
            let err = acc.sub(&u).unwrap();
            let e0 = err.inner(&err).re.sqrt();
            assert!(e0 <= 1e-13, "telescoping error {e0}");
            assert!(u.lp_partial(top).max_abs_diff(&u) < 1e-15);
        }
    }

    #[test]
    fn lp_block_of_low_mode_and_empty_blocks() {
        let g = TorusGrid::new(1, 64).unwrap();
        let e1 = FourierField::single_mode(g, [1, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(e1.lp_block(0), e1);
        let kmax = g.kmax() as f64;
        let u = FourierField::from_fn(g, FieldFlags::REAL, |x| (5.0 * x[0]).sin() + (31.0 * x[0]).cos());
        for k in 0..12u32 {
            if 2f64.powi(k as i32 - 1) * 1.1 > kmax {
                assert!(u.lp_block(k).coeffs().iter().all(|c| *c == ZERO));
            }
        }
    }

    #[test]
    fn dealiased_product_is_exact_for_trig_polynomials() {
        let g = TorusGrid::new(1, 16).unwrap();
        let a = FourierField::from_fn(g, FieldFlags::REAL, |x| (7.0 * x[0]).cos());
        let b = FourierField::from_fn(g, FieldFlags::REAL, |x| (6.0 * x[0]).cos());
        let p = a.mul(&b).unwrap();
        // cos7x cos6x = (cos13x + cos x)/2 ; only cos x survives the truncation
        let expect = FourierField::from_fn(g, FieldFlags::REAL, |x| 0.5 * x[0].cos());
        assert!(p.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn reflection_and_conjugation() {
        let g = TorusGrid::new(1, 16).unwrap();
        let s = FourierField::from_fn(g, FieldFlags::REAL, |x| x[0].sin() + (2.0 * x[0]).cos());
        let r = s.reflect();
        let expect = FourierField::from_fn(g, FieldFlags::REAL, |x| -x[0].sin() + (2.0 * x[0]).cos());
        assert!(r.max_abs_diff(&expect) < 1e-15);
        assert_eq!(s.conj(), s);
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = TorusGrid::new(2, 8).unwrap();
        let u = random_field(&mut rng, g, 1.0, FieldFlags::COMPLEX);
        let text = u.to_snapshot();
        let back = FourierField::from_snapshot(&text).unwrap();
        assert_eq!(back, u);
        assert!(FourierField::from_snapshot("{\"d\":1}").is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = FourierField::zeros(TorusGrid::new(1, 8).unwrap());
        let b = FourierField::zeros(TorusGrid::new(1, 16).unwrap());
        assert!(matches!(a.add(&b), Err(Error::GridMismatch { .. })));
    }
}
