//! Bony's decomposition `uv = Op^BW(u)v + Op^BW(v)u + R(u, v)`.

use num_complex::Complex64;

use super::cutoff::CutoffParams;
use super::quantize::assemble_bony_weyl;
use super::symbol::{Regularity, Symbol};
use crate::error::Result;
use crate::field::{FieldFlags, FourierField};
use crate::grid::bracket;

/// The three pieces of a paraproduct decomposition.
#[derive(Clone, Debug)]
pub struct Paraproducts {
    /// `Op^BW(u) v`
    pub low_u: FourierField,
    /// `Op^BW(v) u`
    pub low_v: FourierField,
    /// `R(u, v)`
    pub remainder: FourierField,
}

impl Paraproducts {
    pub fn sum(&self) -> Result<FourierField> {
        self.low_u.add(&self.low_v)?.add(&self.remainder)
    }
}

/// `θ_ε(p, q) = 1 - χ_ε(p/⟨p+2q⟩) - χ_ε(q/⟨2p+q⟩)` for input modes `p` of
/// `u` and `q` of `v`.
pub fn theta(cutoff: CutoffParams, p: [i64; 2], q: [i64; 2]) -> f64 {
    let a = cutoff.chi_eps_radial(
        crate::grid::mode_norm(p) / bracket([p[0] + 2 * q[0], p[1] + 2 * q[1]]),
    );
    let b = cutoff.chi_eps_radial(
        crate::grid::mode_norm(q) / bracket([2 * p[0] + q[0], 2 * p[1] + q[1]]),
    );
    1.0 - a - b
}

/// `R(u, v)` by direct double sum over input modes whose output mode lies
/// in the mode set.
pub fn paraproduct_remainder(u: &FourierField, v: &FourierField, cutoff: CutoffParams) -> Result<FourierField> {
    u.check_grid(v)?;
    let g = u.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); g.num_modes()];
    for (ip, up) in u.coeffs().iter().enumerate() {
        if *up == Complex64::new(0.0, 0.0) {
            continue;
        }
        let p = g.mode(ip);
        for (iq, vq) in v.coeffs().iter().enumerate() {
            let q = g.mode(iq);
            if let Some(o) = g.mode_index([p[0] + q[0], p[1] + q[1]]) {
                let t = theta(cutoff, p, q);
                if t != 0.0 {
                    out[o] += up * vq * t;
                }
            }
        }
    }
    FourierField::from_coeffs(g, out, FieldFlags::COMPLEX)
}

/// Splits the (truncated, dealiased) product `uv` into two paraproducts and
/// a remainder.
pub fn paraproduct_decompose(u: &FourierField, v: &FourierField, cutoff: CutoffParams) -> Result<Paraproducts> {
    u.check_grid(v)?;
    let op_u = assemble_bony_weyl(&Symbol::function(u, Regularity::LInf), cutoff)?;
    let op_v = assemble_bony_weyl(&Symbol::function(v, Regularity::LInf), cutoff)?;
    Ok(Paraproducts {
        low_u: op_u.apply(v)?,
        low_v: op_v.apply(u)?,
        remainder: paraproduct_remainder(u, v, cutoff)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::norms::sobolev_norm;
    use crate::sampling::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_and_opposite_modes() {
        let g = TorusGrid::new(1, 32).unwrap();
        let c = CutoffParams::default();
        let one = FourierField::constant(g, 1.0);
        let p = paraproduct_decompose(&one, &one, c).unwrap();
        assert!((p.low_u.coeff([0, 0]) - 1.0).norm() < 1e-15);
        assert!((p.low_v.coeff([0, 0]) - 1.0).norm() < 1e-15);
        assert!((p.remainder.coeff([0, 0]) + 1.0).norm() < 1e-15);

        let e = FourierField::single_mode(g, [1, 0], Complex64::new(1.0, 0.0)).unwrap();
        let f = FourierField::single_mode(g, [-1, 0], Complex64::new(1.0, 0.0)).unwrap();
        for eps in [0.05, 0.125, 0.2499] {
            let c = CutoffParams::new(eps).unwrap();
            let p = paraproduct_decompose(&e, &f, c).unwrap();
            assert_eq!(sobolev_norm(&p.low_u, 0.0), 0.0);
            assert_eq!(sobolev_norm(&p.low_v, 0.0), 0.0);
            assert_eq!(p.remainder.coeff([0, 0]), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn exact_reconstruction_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let c = CutoffParams::default();
        for &(d, n) in &[(1, 64), (2, 16)] {
            let g = TorusGrid::new(d, n).unwrap();
            for _ in 0..5 {
                let u = random_field(&mut rng, g, 0.5, FieldFlags::REAL);
                let v = random_field(&mut rng, g, 0.5, FieldFlags::REAL);
                let p = paraproduct_decompose(&u, &v, c).unwrap();
                let uv = u.mul(&v).unwrap();
                let err = sobolev_norm(&uv.sub(&p.sum().unwrap()).unwrap(), 0.0);
                assert!(err <= 1e-12 * sobolev_norm(&u, 0.0) * sobolev_norm(&v, 0.0));
                let r2 = paraproduct_remainder(&v, &u, c).unwrap();
                assert!(r2.max_abs_diff(&p.remainder) <= 1e-14);
            }
        }
    }
}
