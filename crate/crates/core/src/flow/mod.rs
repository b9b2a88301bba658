//! Linear paradifferential flows with frozen or time-dependent
//! coefficients.

pub mod config;
pub mod energy;
pub mod generator;
pub mod linear;
pub mod trajectory;

pub use config::{FlowConfig, Integrator};
pub use energy::{
    energy_growth_probe, modified_energy, write_energy_csv, EnergyForm, EnergyProbe, EnergySample, GrowthRow,
    GrowthTable,
};
pub use generator::mollified_generator;
pub use linear::{solve_linear, Frozen, FrozenProblem, LinearProblem};
pub use trajectory::{stacked_norm, Trajectory};
