//! Firefly-algorithm optimization toolkit for downlink beamforming.
//!
//! The crate is organized around a generic penalty-method firefly engine
//! ([`fa`]) that searches over named sets of complex matrices. Four transmit
//! beamforming problems ([`problems`]) plug into it, two deterministic
//! reference solvers ([`baselines`]) provide comparison points, [`channels`]
//! generates the radio scenarios, and [`harness`] runs seeded Monte Carlo
//! sweeps and serializes the results.

pub mod baselines;
pub mod channels;
pub mod fa;
pub mod harness;
pub mod numerics;
pub mod problems;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {details}")]
    DimensionMismatch { op: &'static str, details: String },

    #[error("non-finite value encountered in {op}")]
    NonFinite { op: &'static str },

    #[error("{op}: matrix is not Hermitian within relative tolerance {tol:.1e}")]
    NotHermitian { op: &'static str, tol: f64 },

    #[error("power iteration hit the limit of {iterations} iterations (last residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("degenerate channel for user {user}: iterate direction carries no gain")]
    DegenerateChannel { user: usize },

    #[error("infeasible power recovery: user {user} would need power {power:.3e}")]
    InfeasibleRecovery { user: usize, power: f64 },

    #[error("evaluator produced a non-finite value at generation {generation}")]
    EvaluatorFailure { generation: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("singular linear system at pivot {index}")]
    SingularSystem { index: usize },

    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
