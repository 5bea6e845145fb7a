//! Self-contained complex linear algebra.

mod eigh;
mod matrix;
pub mod ops;
mod propagate;
mod rk4;
mod state;

use thiserror::Error;

pub use eigh::{eigh, Eigh};
pub use matrix::{CMatrix, HermitianOperator};
pub use propagate::{propagate, Propagator};
pub use rk4::rk4_evolve;
pub use state::{purity, von_neumann_entropy, DensityMatrix, StateVector};

pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: |H_ij - conj(H_ji)| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("density matrix trace {trace} is not 1 (|trace - 1| > 1e-8)")]
    NotNormalized { trace: f64 },

    #[error("density matrix has eigenvalue {value:e} below the positivity floor")]
    NegativeEigenvalue { value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("entries must be finite")]
    NonFinite,

    #[error("integrator step rejected at step {step}: {reason}")]
    StepTooLarge { step: usize, reason: String },

    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
}

pub type LinalgResult<T> = Result<T, LinalgError>;
