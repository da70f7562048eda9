//! State-dependent lower and upper bounds on the product and the sum of the
//! variances of two observables.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: small dense complex matrices, a Jacobi Hermitian
//!   eigensolver, and the spin-1 / Pauli operators used by the presets.
//! - [`moments`]: means, variances, covariance and deviation vectors.
//! - [`lower`]: Robertson–Schrödinger, basis, fidelity-weighted and
//!   parallelogram lower bounds, plus two literature sum bounds used as
//!   baselines.
//! - [`upper`]: reverse Cauchy–Schwarz product bounds and Dunkl–Williams sum
//!   bounds.
//! - [`optimizer`]: compass search over orthonormal bases.
//! - [`harness`]: figure sweeps, random verification runs, CSV/JSON output
//!   and the config file format.

pub mod bound;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lower;
pub mod moments;
pub mod optimizer;
pub mod random;
pub mod upper;

pub use bound::{evaluate, BoundId, BoundResult, EvalContext, Quantity, Side};
pub use error::{Error, Result};
pub use linalg::{
    eigh, pauli_operators, qubit_state_from_bloch, spin1_operators, ComplexMatrix, Observable,
    OrthonormalBasis, QuantumState, C64,
};
pub use moments::{DeviationVector, MomentSet};
pub use optimizer::{OptimizationReport, OptimizerConfig, UnitaryParams};
