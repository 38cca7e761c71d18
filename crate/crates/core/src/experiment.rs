//! Seeded batch harness comparing the fixed-time and adaptive controllers.
//!
//! Comparisons pair seeds: for each (scenario, replication) both
//! controllers consume the identical arrival stream, so the throughput
//! difference isolates the controller effect. Detector noise draws come
//! from a generator separate from the arrival stream, keeping arrivals
//! paired even when noise is enabled.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::detection::{Detector, NoisyDetector};
use crate::error::SimError;
use crate::scenario::ScenarioConfig;
use crate::signal::{ControllerKind, SignalController};
use crate::sim::{self, VehicleState, WorldState, DT_SECONDS, TICKS_PER_SECOND};
use crate::trace::{write_event, TraceEvent};
use crate::types::{Direction, PerDirection};

/// Service order of the four signals.
pub const DEFAULT_CYCLE_ORDER: [Direction; 4] = Direction::ALL;

/// Generator for detector noise, derived from the run seed but independent
/// of the arrival stream.
pub fn noise_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15)
}

/// Throughput and wait statistics for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub scenario: String,
    pub controller: ControllerKind,
    pub seed: u64,
    /// Vehicles that crossed the stop line, per approach.
    pub crossed: PerDirection<u64>,
    pub total_crossed: u64,
    pub spawned: u64,
    /// Arrival attempts skipped because the chosen spawn cell was occupied.
    pub suppressed_arrivals: u64,
    /// Mean seconds from spawn to crossing, over crossed vehicles
    /// (0 when nothing crossed).
    pub mean_wait: f64,
    /// Vehicles still short of the stop line when the run ended; their
    /// censored waits are not part of `mean_wait`.
    pub queue_residue: u64,
}

/// Run one scenario under one controller, with the detector implied by the
/// scenario's noise parameters.
pub fn run_simulation(
    scenario: &ScenarioConfig,
    kind: ControllerKind,
) -> Result<RunResult, SimError> {
    let mut detector = NoisyDetector::new(scenario.noise, noise_rng(scenario.seed));
    run_with_detector(scenario, kind, &mut detector, None)
}

/// Full tick loop with an explicit detector and optional event-trace sink.
/// Structural invariants are checked every tick; any violation aborts with
/// the offending tick in the error.
pub fn run_with_detector(
    scenario: &ScenarioConfig,
    kind: ControllerKind,
    detector: &mut dyn Detector,
    mut trace: Option<&mut dyn Write>,
) -> Result<RunResult, SimError> {
    let ticks = scenario.ticks();
    let mut world = WorldState::new(scenario);
    let avg_cross_time = scenario.classes.map(|p| p.avg_cross_time);
    let (mut controller, initial_commands) = SignalController::new(
        kind,
        scenario.controller,
        avg_cross_time,
        DEFAULT_CYCLE_ORDER,
    );

    let emit = |sink: &mut Option<&mut dyn Write>, event: TraceEvent| -> Result<(), SimError> {
        if let Some(w) = sink.as_deref_mut() {
            write_event(w, &event)?;
        }
        Ok(())
    };

    for command in &initial_commands {
        emit(&mut trace, TraceEvent::from_command(command))?;
    }

    for tick in 0..ticks {
        world.begin_tick(tick);
        for vehicle in sim::spawn_step(&mut world, scenario) {
            emit(
                &mut trace,
                TraceEvent::Spawn {
                    tick,
                    vehicle: vehicle.id,
                    approach: vehicle.approach,
                    class: vehicle.class,
                    lane: vehicle.lane,
                    will_turn: vehicle.will_turn,
                },
            )?;
        }
        let output = controller.tick(&world, detector, tick)?;
        if let Some(snapshot) = &output.capture {
            emit(&mut trace, TraceEvent::from_capture(snapshot))?;
        }
        for command in &output.commands {
            emit(&mut trace, TraceEvent::from_command(command))?;
        }
        for event in sim::motion_step(&mut world, &controller.plan, DT_SECONDS)? {
            emit(&mut trace, TraceEvent::from_vehicle_event(tick, &event))?;
        }
        sim::check_invariants(&world)?;
    }

    Ok(collect_result(scenario, kind, &world))
}

fn collect_result(scenario: &ScenarioConfig, kind: ControllerKind, world: &WorldState) -> RunResult {
    let crossed = world.approaches.map(|a| a.crossed);
    let total_crossed: u64 = crossed.iter().map(|(_, &n)| n).sum();
    let spawned: u64 = world.approaches.iter().map(|(_, a)| a.spawned).sum();
    let suppressed: u64 = world.approaches.iter().map(|(_, a)| a.suppressed).sum();
    let wait_ticks: u64 = world.approaches.iter().map(|(_, a)| a.wait_ticks).sum();
    let mean_wait = if total_crossed > 0 {
        wait_ticks as f64 / total_crossed as f64 / TICKS_PER_SECOND as f64
    } else {
        0.0
    };
    let queue_residue = world
        .live_vehicles()
        .filter(|v| v.state == VehicleState::Moving)
        .count() as u64;
    RunResult {
        scenario: scenario.name.clone(),
        controller: kind,
        seed: scenario.seed,
        crossed,
        total_crossed,
        spawned,
        suppressed_arrivals: suppressed,
        mean_wait,
        queue_residue,
    }
}

/// Percentage throughput change of the adaptive controller over the static
/// baseline: `100 * (adaptive - static) / static`. Errors when the
/// baseline total is zero, which leaves the ratio undefined.
pub fn improvement_percent(static_total: f64, adaptive_total: f64) -> Result<f64, SimError> {
    if !static_total.is_finite() || static_total <= 0.0 {
        return Err(SimError::UndefinedBaseline);
    }
    Ok(100.0 * (adaptive_total - static_total) / static_total)
}

/// One run inside a comparison, keyed by (scenario, replication).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRun {
    pub scenario: String,
    pub replication: u32,
    pub result: RunResult,
}

/// Per-scenario aggregate of a paired comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scenario: String,
    /// Mean static total crossings over the replications.
    pub static_mean: f64,
    /// Mean adaptive total crossings over the replications.
    pub adaptive_mean: f64,
    pub improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub mean_improvement_percent: f64,
    pub min_improvement_percent: f64,
    pub max_improvement_percent: f64,
}

/// Static-versus-adaptive comparison over a scenario set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
    /// Every individual run, sorted by (scenario, replication, controller).
    pub runs: Vec<ReplicationRun>,
}

/// Run both controllers over each scenario for the given number of
/// replications. Replication `r` offsets the scenario seed by `r`; within
/// one replication both controllers share the seed, hence the arrival
/// stream. Results are keyed and sorted by (scenario, replication), so the
/// report does not depend on input order.
pub fn run_comparison(
    scenarios: &[ScenarioConfig],
    replications: u32,
) -> Result<ComparisonReport, SimError> {
    if scenarios.is_empty() {
        return Err(SimError::InvalidArgument(
            "run_comparison needs at least one scenario".into(),
        ));
    }
    if replications == 0 {
        return Err(SimError::InvalidArgument(
            "run_comparison needs at least one replication".into(),
        ));
    }

    let mut ordered: Vec<&ScenarioConfig> = scenarios.iter().collect();
    ordered.sort_by(|a, b| a.name.cmp(&b.name));

    let mut runs = Vec::new();
    let mut totals: BTreeMap<String, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for scenario in ordered {
        for replication in 0..replications {
            let seeded = scenario.with_seed(scenario.seed.wrapping_add(replication as u64));
            let run = |kind: ControllerKind| -> Result<RunResult, SimError> {
                run_simulation(&seeded, kind).map_err(|e| SimError::Run {
                    scenario: scenario.name.clone(),
                    replication,
                    controller: kind.name(),
                    source: Box::new(e),
                })
            };
            let static_result = run(ControllerKind::Static)?;
            let adaptive_result = run(ControllerKind::Adaptive)?;
            let entry = totals.entry(scenario.name.clone()).or_default();
            entry.0.push(static_result.total_crossed);
            entry.1.push(adaptive_result.total_crossed);
            runs.push(ReplicationRun {
                scenario: scenario.name.clone(),
                replication,
                result: static_result,
            });
            runs.push(ReplicationRun {
                scenario: scenario.name.clone(),
                replication,
                result: adaptive_result,
            });
        }
    }

    let mut rows = Vec::new();
    for (scenario, (static_totals, adaptive_totals)) in &totals {
        let static_mean = mean(static_totals);
        let adaptive_mean = mean(adaptive_totals);
        let improvement = improvement_percent(static_mean, adaptive_mean).map_err(|e| {
            SimError::Run {
                scenario: scenario.clone(),
                replication: 0,
                controller: "comparison",
                source: Box::new(e),
            }
        })?;
        rows.push(ComparisonRow {
            scenario: scenario.clone(),
            static_mean,
            adaptive_mean,
            improvement_percent: improvement,
        });
    }

    let improvements: Vec<f64> = rows.iter().map(|r| r.improvement_percent).collect();
    let summary = ComparisonSummary {
        mean_improvement_percent: improvements.iter().sum::<f64>() / improvements.len() as f64,
        min_improvement_percent: improvements.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
        max_improvement_percent: improvements.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)),
    };

    Ok(ComparisonReport { rows, summary, runs })
}

fn mean(values: &[u64]) -> f64 {
    values.iter().sum::<u64>() as f64 / values.len() as f64
}

impl ComparisonReport {
    /// Per-run CSV: one line per (scenario, replication, controller).
    /// Fixed column order, dot decimals.
    pub fn write_runs_csv(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            w,
            "scenario,replication,controller,crossed_right,crossed_down,crossed_left,crossed_up,total_crossed,spawned,suppressed,queue_residue,mean_wait"
        )?;
        for run in &self.runs {
            let r = &run.result;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{:.3}",
                run.scenario,
                run.replication,
                r.controller,
                r.crossed.right,
                r.crossed.down,
                r.crossed.left,
                r.crossed.up,
                r.total_crossed,
                r.spawned,
                r.suppressed_arrivals,
                r.queue_residue,
                r.mean_wait,
            )?;
        }
        Ok(())
    }

    /// Per-scenario summary CSV: static and adaptive mean totals plus the
    /// improvement percentage.
    pub fn write_summary_csv(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "scenario,static_mean,adaptive_mean,improvement_percent")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{:.4},{:.4},{:.4}",
                row.scenario, row.static_mean, row.adaptive_mean, row.improvement_percent
            )?;
        }
        Ok(())
    }
}

/// The three arrival-distribution regimes of the benchmark suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NearEqual,
    Uniform,
    Skewed,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::NearEqual, Regime::Uniform, Regime::Skewed];

    pub fn name(self) -> &'static str {
        match self {
            Regime::NearEqual => "near_equal",
            Regime::Uniform => "uniform",
            Regime::Skewed => "skewed",
        }
    }

    /// Regime of a suite scenario, by name prefix.
    pub fn of_scenario_name(name: &str) -> Option<Regime> {
        if name.starts_with("near-equal-") {
            Some(Regime::NearEqual)
        } else if name.starts_with("uniform-") {
            Some(Regime::Uniform)
        } else if name.starts_with("skewed-") {
            Some(Regime::Skewed)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeStats {
    pub scenarios: usize,
    pub mean_improvement_percent: f64,
}

/// Mean improvement per regime, for suite reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeSummary {
    pub near_equal: RegimeStats,
    pub uniform: RegimeStats,
    pub skewed: RegimeStats,
}

/// Group a suite comparison's rows by regime and average improvements.
/// Errors when any regime has no rows.
pub fn regime_summary(report: &ComparisonReport) -> Result<RegimeSummary, SimError> {
    let mut grouped: BTreeMap<Regime, Vec<f64>> = BTreeMap::new();
    for row in &report.rows {
        if let Some(regime) = Regime::of_scenario_name(&row.scenario) {
            grouped.entry(regime).or_default().push(row.improvement_percent);
        }
    }
    let stats = |regime: Regime| -> Result<RegimeStats, SimError> {
        let values = grouped.get(&regime).ok_or_else(|| {
            SimError::InvalidArgument(format!("no scenarios in regime {}", regime.name()))
        })?;
        Ok(RegimeStats {
            scenarios: values.len(),
            mean_improvement_percent: values.iter().sum::<f64>() / values.len() as f64,
        })
    };
    Ok(RegimeSummary {
        near_equal: stats(Regime::NearEqual)?,
        uniform: stats(Regime::Uniform)?,
        skewed: stats(Regime::Skewed)?,
    })
}

/// Serialize the regime summary as a small JSON document.
pub fn write_regime_summary_json(
    summary: &RegimeSummary,
    w: &mut dyn Write,
) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, summary)?;
    writeln!(w)
}

// Suite load calibration. The per-tick arrival probabilities place each
// regime at a different point on the saturation curve of the static
// baseline (see the suite docs); they are fixed here, together with the
// seeds, so the suite is fully reproducible.
const NEAR_EQUAL_P_ARRIVAL: f64 = 0.03;
const UNIFORM_P_ARRIVAL: f64 = 0.10;
const SKEWED_P_ARRIVAL: f64 = 0.12;

/// The built-in 15-scenario benchmark suite: five scenarios in each of
/// three regimes (perturbed-uniform, exact-uniform, heavily skewed
/// arrival weights), each 300 simulated seconds with a fixed seed.
///
/// The exact weight vectors and loads are this project's calibration; the
/// regime structure (near-equal vs uniform vs skewed) is the suite's
/// organizing principle and the seeds below pin the published numbers.
pub fn benchmark_suite() -> Vec<ScenarioConfig> {
    let mut suite = Vec::with_capacity(15);
    let base = ScenarioConfig::default();

    let near_equal_weights: [[f64; 4]; 5] = [
        [0.28, 0.24, 0.26, 0.22],
        [0.22, 0.27, 0.25, 0.26],
        [0.25, 0.22, 0.28, 0.25],
        [0.27, 0.26, 0.23, 0.24],
        [0.24, 0.25, 0.23, 0.28],
    ];
    for (i, weights) in near_equal_weights.iter().enumerate() {
        let mut scenario = base.clone();
        scenario.name = format!("near-equal-{}", i + 1);
        scenario.arrival_weights = *weights;
        scenario.p_arrival = NEAR_EQUAL_P_ARRIVAL;
        scenario.seed = 1_000 + i as u64 * 100;
        suite.push(scenario);
    }

    for i in 0..5 {
        let mut scenario = base.clone();
        scenario.name = format!("uniform-{}", i + 1);
        scenario.arrival_weights = [0.25; 4];
        scenario.p_arrival = UNIFORM_P_ARRIVAL;
        scenario.seed = 2_000 + i as u64 * 100;
        suite.push(scenario);
    }

    let skewed_weights: [[f64; 4]; 5] = [
        [0.70, 0.10, 0.10, 0.10],
        [0.10, 0.70, 0.10, 0.10],
        [0.10, 0.10, 0.70, 0.10],
        [0.10, 0.10, 0.10, 0.70],
        [0.60, 0.20, 0.10, 0.10],
    ];
    for (i, weights) in skewed_weights.iter().enumerate() {
        let mut scenario = base.clone();
        scenario.name = format!("skewed-{}", i + 1);
        scenario.arrival_weights = *weights;
        scenario.p_arrival = SKEWED_P_ARRIVAL;
        scenario.seed = 3_000 + i as u64 * 100;
        suite.push(scenario);
    }

    suite
}
