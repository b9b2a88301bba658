//! Periodic paradifferential calculus.

pub mod compose;
pub mod cutoff;
pub mod operator;
pub mod paraproduct;
pub mod quantize;
pub mod symbol;

pub use compose::{
    compose_symbol, composition_remainder_probe, poisson_bracket, seminorm_estimate, weyl_to_standard,
    RemainderProbe,
};
pub use cutoff::{chi, CutoffParams};
pub use operator::{BlockOp, ParaOp};
pub use paraproduct::{paraproduct_decompose, paraproduct_remainder, Paraproducts};
pub use quantize::{assemble_bony_weyl, assemble_bony_weyl_matrix, assemble_standard, assemble_weyl};
pub use symbol::{MatrixSymbol, Multiplier, Regularity, Symbol, Term};
