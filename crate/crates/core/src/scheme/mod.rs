//! Iterative construction of the local solution, a direct reference
//! solver, and the studies comparing the two.

pub mod config;
pub mod iterate;
pub mod output;
pub mod reference;
pub mod studies;

pub use config::SchemeConfig;
pub use iterate::{initial_flow, iterate, IterationRow, IterationTrace, SchemeRun, SolveReport};
pub use output::{write_report, write_trajectory};
pub use reference::{integrate_rk4, reference_solve, stable_dt, ReferenceConfig, ReferenceSolution};
pub use studies::{
    continuity_probe, galerkin_study, loglog_slope, reversibility_check, scheme_vs_reference, Agreement,
    ContinuityRow, ContinuityTable, GalerkinRow, GalerkinTable, ReversibilityReport,
};
