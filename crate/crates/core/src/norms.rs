//! Sobolev norms and an LP-based Hölder surrogate.

use crate::error::{Error, Result};
use crate::field::{lp_top_level, FourierField};
use crate::grid::{bracket, mode_norm};

/// `‖u‖_s = (Σ_j |u_j|² ⟨j⟩^{2s})^{1/2}`.
pub fn sobolev_norm(u: &FourierField, s: f64) -> f64 {
    let g = u.grid();
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm_sqr() * bracket(g.mode(i)).powf(2.0 * s))
        .sum::<f64>()
        .sqrt()
}

/// Homogeneous norm `(Σ_{j≠0} |u_j|² |j|^{2s})^{1/2}`.
pub fn homogeneous_norm(u: &FourierField, s: f64) -> f64 {
    let g = u.grid();
    u.coeffs()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != g.zero_index())
        .map(|(i, c)| c.norm_sqr() * mode_norm(g.mode(i)).powf(2.0 * s))
        .sum::<f64>()
        .sqrt()
}

/// `max_k 2^{kρ} sup|Δ_k u| + sup|u|`, with sups over grid points.
///
/// This is an equivalent-norm surrogate for the Hölder–Zygmund norm of order
/// `ρ`, not the difference-quotient norm itself; for a constant `c` it
/// returns `2|c|`.
pub fn holder_norm_estimate(u: &FourierField, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("Hölder index {rho} must be >= 0")));
    }
    let top = lp_top_level(u.grid());
    let blocks = (0..=top)
        .map(|k| 2f64.powf(k as f64 * rho) * u.lp_block(k).sup())
        .fold(0.0, f64::max);
    Ok(blocks + u.sup())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldFlags;
    use crate::grid::TorusGrid;
    use crate::sampling::random_field;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g1() -> TorusGrid {
        TorusGrid::new(1, 32).unwrap()
    }

    #[test]
    fn constants_and_single_modes() {
        let c = FourierField::constant(g1(), -3.0);
        for s in [-1.0, 0.0, 2.5] {
            assert!((sobolev_norm(&c, s) - 3.0).abs() < 1e-15);
            assert_eq!(homogeneous_norm(&c, s), 0.0);
        }
        let e = FourierField::single_mode(g1(), [1, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert!((sobolev_norm(&e, 2.0) - 1.0).abs() < 1e-15);
        let two_three = FourierField::single_mode(g1(), [2, 0], Complex64::new(1.0, 0.0))
            .unwrap()
            .add(&FourierField::single_mode(g1(), [3, 0], Complex64::new(1.0, 0.0)).unwrap())
            .unwrap();
        assert!((sobolev_norm(&two_three, 1.0) - 13f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn parseval_against_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(d, n) in &[(1, 64), (2, 16)] {
            let g = TorusGrid::new(d, n).unwrap();
            let u = random_field(&mut rng, g, 0.5, FieldFlags::COMPLEX);
            let quad: f64 =
                u.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.num_points() as f64;
            let n0 = sobolev_norm(&u, 0.0).powi(2);
            assert!((quad - n0).abs() <= 1e-12 * n0);
        }
    }

    #[test]
    fn projection_tail_bound_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = TorusGrid::new(1, 128).unwrap();
        let (s0, s) = (0.6, 3.1);
        for _ in 0..20 {
            let u = random_field(&mut rng, g, 1.0, FieldFlags::REAL_ZERO_MEAN);
            for n in [4.0, 8.0, 16.0, 32.0] {
                let pu = u.project_low(n);
                let tail = u.sub(&pu).unwrap();
                assert!(sobolev_norm(&tail, s0) <= n.powf(s0 - s) * sobolev_norm(&u, s) * (1.0 + 1e-12));
                let lhs = sobolev_norm(&u, 0.0).powi(2);
                let rhs = sobolev_norm(&pu, 0.0).powi(2) + sobolev_norm(&tail, 0.0).powi(2);
                assert!((lhs - rhs).abs() <= 1e-13 * lhs);
            }
        }
    }

    #[test]
    fn holder_estimate_behaviour() {
        let g = TorusGrid::new(1, 512).unwrap();
        let c = FourierField::constant(g, 2.0);
        let hc = holder_norm_estimate(&c, 1.5).unwrap();
        assert!((2.0..=4.0 + 1e-12).contains(&hc));
        assert!(holder_norm_estimate(&c, -0.1).is_err());

        // growth like k^ρ for e^{ikx}
        let rho = 1.0;
        let ks = [8i64, 16, 32, 64, 128];
        let vals: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let e = FourierField::single_mode(g, [k, 0], Complex64::new(1.0, 0.0)).unwrap();
                holder_norm_estimate(&e, rho).unwrap()
            })
            .collect();
        let slope = (vals[4].ln() - vals[0].ln()) / ((ks[4] as f64).ln() - (ks[0] as f64).ln());
        assert!((slope - rho).abs() < 0.25, "slope {slope}");

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let u = random_field(&mut rng, g, 1.5, FieldFlags::REAL);
            let h0 = holder_norm_estimate(&u, 0.0).unwrap();
            let sup = u.sup();
            assert!(h0 >= sup / 3.0 && h0 <= 3.0 * sup, "h0 {h0} sup {sup}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn interpolation_inequality(seed in 0u64..10_000, s1 in -1.0f64..4.0, s2 in -1.0f64..4.0, theta in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_field(&mut rng, TorusGrid::new(1, 32).unwrap(), 0.7, FieldFlags::COMPLEX);
            let lhs = sobolev_norm(&u, theta * s1 + (1.0 - theta) * s2);
            let rhs = sobolev_norm(&u, s1).powf(theta) * sobolev_norm(&u, s2).powf(1.0 - theta);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
