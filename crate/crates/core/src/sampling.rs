//! Seeded random data used by the probes, studies and tests.

use num_complex::Complex64;
use rand::Rng;

use crate::field::{FieldFlags, FourierField};
use crate::grid::{bracket, TorusGrid};

/// Field with coefficients uniform in the unit square times `⟨j⟩^{-decay}`.
pub fn random_field<R: Rng>(rng: &mut R, grid: TorusGrid, decay: f64, flags: FieldFlags) -> FourierField {
    let coeffs = grid
        .modes()
        .map(|j| {
            let w = bracket(j).powf(-decay);
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * w
        })
        .collect();
    FourierField::from_coeffs(grid, coeffs, flags).expect("mode-set length")
}

/// Real zero-mean field with `sup |u| <= amp`, band-limited to `|j| <= band`.
pub fn random_bounded_field<R: Rng>(
    rng: &mut R,
    grid: TorusGrid,
    band: f64,
    decay: f64,
    amp: f64,
) -> FourierField {
    let u = random_field(rng, grid, decay, FieldFlags::REAL_ZERO_MEAN).project_low(band);
    let sup = u.sup();
    if sup == 0.0 {
        u
    } else {
        u.scale(amp / sup)
    }
}
