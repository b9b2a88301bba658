//! Paradifferential calculus on the torus and a constructive local solver
//! for the irrotational Euler–Korteweg system.

// NaN-rejecting range checks are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calculus;
pub mod ek;
pub mod error;
pub mod field;
pub mod flow;
pub mod grid;
pub mod norms;
pub mod runner;
pub mod sampling;
pub mod scheme;

pub use error::{Error, Result};
pub use field::{FieldFlags, FourierField};
pub use grid::{Mode, TorusGrid, Xi};
