//! Configuration, experiment orchestration and machine-readable
//! diagnostics.

pub mod config;
pub mod criteria;
pub mod suite;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use criteria::{CriterionReport, Metric};
pub use suite::{run_criterion, run_suite, DiagnosticsLog, DiagnosticsRow, Suite, SuiteOutcome};
