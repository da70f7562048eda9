//! Figure sweeps, random-ensemble verification and report output.

pub mod config;
pub mod emit;
pub mod single;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

use crate::bound::{evaluate, BoundId, BoundResult, EvalContext};
use crate::error::Error;
use crate::linalg::{Observable, QuantumState};

pub use config::Config;
pub use emit::{Format, Report};
pub use single::{run_compute, run_optimize, ComputeReport, Instance, OptimizeOutput, OptimizeTarget, StateInput};
pub use sweep::{run_sweep, Preset, StateFamily, SweepRow, SweepSpec, SweepTable, ThetaGrid};
pub use verify::{run_verification, VerificationReport, VerifySpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("unknown preset `{0}` (expected fig1, fig2, fig3, fig4 or custom)")]
    UnknownPreset(String),

    #[error("unknown bound id `{0}`")]
    UnknownBoundId(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Numeric(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Parses a comma-separated list of bound ids. An empty string is an empty
/// list.
pub fn parse_bound_list(text: &str) -> Result<Vec<BoundId>, HarnessError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| HarnessError::UnknownBoundId(s.to_owned())))
        .collect()
}

/// Like [`evaluate`], but a pure-state bound on a mixed state comes back
/// undefined instead of as an error.
pub fn evaluate_lenient(
    id: BoundId,
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    ctx: &EvalContext,
) -> Result<BoundResult, Error> {
    match evaluate(id, s, a, b, ctx) {
        Err(Error::MixedStateUnsupported) => {
            Ok(BoundResult::undefined(id, "requires a pure state"))
        }
        other => other,
    }
}
