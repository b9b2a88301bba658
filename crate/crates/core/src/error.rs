use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("fields live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("symbol evaluation failed at x = {x:?}, xi = {xi:?}")]
    SymbolEvaluation { x: [f64; 2], xi: [f64; 2] },

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("insufficient resolution: level {level} needs |j| up to {needed}, grid holds {available}")]
    InsufficientResolution {
        level: u32,
        needed: f64,
        available: i64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("inadmissible density at x = {x:?}: mbar + rho = {value} violates {bound}")]
    Inadmissible {
        x: [f64; 2],
        value: f64,
        bound: String,
    },

    #[error("non-positive diagonalizer radicand {value} at x = {x:?}")]
    Radicand { x: [f64; 2], value: f64 },

    #[error("time step {dt} too large for generator bound {bound} (need dt * bound <= 0.5)")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("admissibility lost at t = {t}: {reason}")]
    AdmissibilityLost { t: f64, reason: String },

    #[error("norm growth {norm} exceeds limit {limit} at iterate {iterate}")]
    Growth {
        iterate: usize,
        norm: f64,
        limit: f64,
    },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
