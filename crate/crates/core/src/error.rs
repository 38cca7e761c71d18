//! Error types for simulation runs and scenario configuration.

use std::path::PathBuf;

use thiserror::Error;

use crate::types::Direction;

/// A run-aborting simulation error. Every variant that can occur inside
/// the tick loop names the tick it happened at.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("tick {tick}: detector failure on {approach}: {message}")]
    Detector {
        tick: u64,
        approach: Direction,
        message: String,
    },

    #[error("tick {tick}: advance called with {remaining:.1}s remaining on the active signal")]
    AdvanceBeforeExpiry { tick: u64, remaining: f64 },

    #[error("tick {tick}: vehicle {vehicle} crossed the stop line on {approach} against a red signal")]
    RedViolation {
        tick: u64,
        vehicle: u64,
        approach: Direction,
    },

    #[error("tick {tick}: invariant violation: {detail}")]
    Invariant { tick: u64, detail: String },

    #[error("improvement undefined: static baseline total is zero")]
    UndefinedBaseline,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario {scenario} (replication {replication}, {controller}): {source}")]
    Run {
        scenario: String,
        replication: u32,
        controller: &'static str,
        #[source]
        source: Box<SimError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One named violation inside a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Path of the offending field, e.g. `controller.min_green`.
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Scenario file errors. Reading, syntax, and validation failures are kept
/// distinct so the CLI can report each with its own diagnostic.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario file {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid scenario: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
