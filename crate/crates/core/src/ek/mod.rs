//! Irrotational Euler–Korteweg system on the torus.

pub mod diag;
pub mod paralin;
pub mod params;
pub mod rhs;
pub mod state;

pub use diag::{diag_frame, diag_identity_residual, lambda_of, DiagFrame, DiagResidual};
pub use paralin::{
    coefficient_fields, generator, paralinear_split, remainder_r, rhs_complex, symbols_a1, symbols_a2,
    CoefficientFields, ParalinearSplit,
};
pub use params::{CapillarityLaw, EKParams, PotentialLaw};
pub use rhs::ek_rhs_exact;
pub use state::{check_admissible, density_range, from_complex, involution_s, mass, mass_u, to_complex, StateRP, StateU};
