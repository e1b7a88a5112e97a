use alloc::string::String;

use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("rate matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    InvalidRates { min_eigenvalue: f64 },

    #[error("not a valid channel: ||sum T^dag T - I||_max = {residual:e}")]
    InvalidChannel { residual: f64 },

    #[error("degenerate steady manifold: second smallest |lambda| = {second:e}")]
    DegenerateSteadyState { second: f64 },

    #[error("quantumness bound violated: Q = {value} outside [0, {bound}]")]
    BoundViolation { value: f64, bound: f64 },

    #[error("[H, I (x) sigma0] != 0 (max entry {norm:e}); not a Hamiltonian ensemble")]
    NonCommuting { norm: f64 },

    #[error("truncation tail {tail:e} exceeds tolerance {tolerance:e}")]
    TruncationTail { tail: f64, tolerance: f64 },

    #[error("dual and direct routes disagree by {difference:e}")]
    RouteDisagreement { difference: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;
