//! Deterministic microsimulation of a four-way signalized intersection,
//! with a fixed-time baseline controller and an adaptive controller that
//! sizes each green phase from per-class vehicle counts.
//!
//! Module map:
//! - [`sim`] — fixed-timestep world: arrivals, queueing, crossing, exits.
//! - [`signal`] — phase state machine, green-time formula, controllers.
//! - [`detection`] — waiting-count snapshots plus a detection noise model.
//! - [`experiment`] — seeded runs, paired static-vs-adaptive comparisons,
//!   and the built-in 15-scenario benchmark suite.
//! - [`scenario`] — run configuration and its TOML schema.
//! - [`trace`] — line-delimited event trace.
//! - [`cli`] — the `intersim` command-line interface.
//!
//! Everything is deterministic: identical (scenario, seed, controller)
//! inputs produce byte-identical traces and reports.

pub mod cli;
pub mod detection;
pub mod error;
pub mod experiment;
pub mod scenario;
pub mod signal;
pub mod sim;
pub mod trace;
pub mod types;

pub use detection::{apply_noise, ground_truth, DetectionSnapshot, NoiseParams};
pub use error::{ConfigError, SimError};
pub use experiment::{
    improvement_percent, run_comparison, run_simulation, benchmark_suite, ComparisonReport,
    RunResult,
};
pub use scenario::ScenarioConfig;
pub use signal::{
    capture_instant, clamped_green_time, raw_green_time, ControllerConfig, ControllerKind,
    PhasePlan, SignalColor, SignalController,
};
pub use sim::{motion_step, spawn_step, waiting_counts, Vehicle, WorldState};
pub use types::{ClassParams, Direction, PerClass, PerDirection, VehicleClass};
