//! Environment non-classicality measures for open quantum dynamics.
//!
//! The central quantity is the time-dependent indicator `Q_t`, the trace of
//! the classically attributable part of the reduced dynamics, and the degree
//! of environment quantumness `D_Q`, its largest asymptotic departure from 1.
//! Classical noise of any kind (random Hamiltonians, Hamiltonian ensembles,
//! unital collisions) keeps `Q_t = 1`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod laplace;
pub mod linalg;
pub mod microscopic;
pub mod models;
pub mod ode;
pub mod quantumness;
pub mod random;
pub mod stochastic;
pub mod text;
pub mod tolerance;

pub use dynamics::{LindbladModel, Superoperator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, QuantumState, Spectrum, C64};
pub use microscopic::JointModel;
pub use quantumness::{QuantumnessReport, QuantumnessSeries, Reversal};
pub use tolerance::Tolerances;
