//! Python bindings for the intersim core: scenarios, single runs, paired
//! comparisons, and the green-time arithmetic.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use intersim::experiment;
use intersim::scenario::ScenarioConfig;
use intersim::signal::{self, ControllerConfig, ControllerKind};
use intersim::types::{Direction, PerClass, VehicleClass};

fn parse_controller(name: &str) -> PyResult<ControllerKind> {
    match name {
        "static" => Ok(ControllerKind::Static),
        "adaptive" => Ok(ControllerKind::Adaptive),
        other => Err(PyValueError::new_err(format!(
            "unknown controller '{other}' (expected 'static' or 'adaptive')"
        ))),
    }
}

fn per_class_from_dict(map: &BTreeMap<String, f64>, what: &str) -> PyResult<PerClass<f64>> {
    let mut out = PerClass::splat(0.0);
    for (key, value) in map {
        let class = VehicleClass::ALL
            .iter()
            .find(|c| c.name() == key)
            .copied()
            .ok_or_else(|| PyValueError::new_err(format!("unknown vehicle class '{key}' in {what}")))?;
        out[class] = *value;
    }
    Ok(out)
}

/// Scenario configuration, mirroring the TOML schema.
#[pyclass(module = "intersim_py", from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl Scenario {
    /// New scenario with the documented defaults.
    #[new]
    fn new() -> Self {
        Scenario {
            inner: ScenarioConfig::default(),
        }
    }

    /// Parse and validate a scenario from TOML text.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        ScenarioConfig::from_toml(text)
            .map(|inner| Scenario { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Parse and validate a scenario file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        intersim::cli::parse_scenario(std::path::Path::new(path))
            .map(|inner| Scenario { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// The built-in 15-scenario benchmark suite.
    #[staticmethod]
    fn benchmark_suite() -> Vec<Scenario> {
        experiment::benchmark_suite()
            .into_iter()
            .map(|inner| Scenario { inner })
            .collect()
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    /// Re-run validation after field changes; raises on violations.
    fn validate(&self) -> PyResult<()> {
        self.inner
            .validate()
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[setter]
    fn set_name(&mut self, name: String) {
        self.inner.name = name;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration
    }

    #[setter]
    fn set_duration(&mut self, duration: f64) {
        self.inner.duration = duration;
    }

    #[getter]
    fn p_arrival(&self) -> f64 {
        self.inner.p_arrival
    }

    #[setter]
    fn set_p_arrival(&mut self, p: f64) {
        self.inner.p_arrival = p;
    }

    #[getter]
    fn arrival_weights(&self) -> [f64; 4] {
        self.inner.arrival_weights
    }

    #[setter]
    fn set_arrival_weights(&mut self, weights: [f64; 4]) {
        self.inner.arrival_weights = weights;
    }

    #[getter]
    fn turn_probability(&self) -> f64 {
        self.inner.turn_probability
    }

    #[setter]
    fn set_turn_probability(&mut self, p: f64) {
        self.inner.turn_probability = p;
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name='{}', duration={}, p_arrival={}, seed={})",
            self.inner.name, self.inner.duration, self.inner.p_arrival, self.inner.seed
        )
    }
}

/// Result of one simulation run.
#[pyclass(module = "intersim_py", skip_from_py_object)]
#[derive(Clone)]
struct RunSummary {
    inner: experiment::RunResult,
}

#[pymethods]
impl RunSummary {
    #[getter]
    fn scenario(&self) -> String {
        self.inner.scenario.clone()
    }

    #[getter]
    fn controller(&self) -> &'static str {
        self.inner.controller.name()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn total_crossed(&self) -> u64 {
        self.inner.total_crossed
    }

    #[getter]
    fn crossed(&self) -> BTreeMap<String, u64> {
        Direction::ALL
            .iter()
            .map(|&d| (d.name().to_string(), self.inner.crossed[d]))
            .collect()
    }

    #[getter]
    fn spawned(&self) -> u64 {
        self.inner.spawned
    }

    #[getter]
    fn suppressed_arrivals(&self) -> u64 {
        self.inner.suppressed_arrivals
    }

    #[getter]
    fn mean_wait(&self) -> f64 {
        self.inner.mean_wait
    }

    #[getter]
    fn queue_residue(&self) -> u64 {
        self.inner.queue_residue
    }

    fn __repr__(&self) -> String {
        format!(
            "RunSummary(scenario='{}', controller='{}', total_crossed={})",
            self.inner.scenario,
            self.inner.controller.name(),
            self.inner.total_crossed
        )
    }
}

/// Paired static-vs-adaptive comparison report.
#[pyclass(module = "intersim_py", skip_from_py_object)]
#[derive(Clone)]
struct Comparison {
    inner: experiment::ComparisonReport,
}

#[pymethods]
impl Comparison {
    /// Rows as (scenario, static_mean, adaptive_mean, improvement_percent).
    fn rows(&self) -> Vec<(String, f64, f64, f64)> {
        self.inner
            .rows
            .iter()
            .map(|r| {
                (
                    r.scenario.clone(),
                    r.static_mean,
                    r.adaptive_mean,
                    r.improvement_percent,
                )
            })
            .collect()
    }

    /// (mean, min, max) improvement percent across rows.
    fn summary(&self) -> (f64, f64, f64) {
        let s = &self.inner.summary;
        (
            s.mean_improvement_percent,
            s.min_improvement_percent,
            s.max_improvement_percent,
        )
    }

    fn runs_csv(&self) -> String {
        let mut buf = Vec::new();
        self.inner.write_runs_csv(&mut buf).expect("vec write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    fn summary_csv(&self) -> String {
        let mut buf = Vec::new();
        self.inner.write_summary_csv(&mut buf).expect("vec write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    fn __repr__(&self) -> String {
        format!(
            "Comparison(rows={}, mean_improvement={:+.2}%)",
            self.inner.rows.len(),
            self.inner.summary.mean_improvement_percent
        )
    }
}

/// Run one scenario under 'static' or 'adaptive'. When `trace_path` is
/// given, the event trace is written there as JSON lines.
#[pyfunction]
#[pyo3(signature = (scenario, controller, trace_path = None))]
fn run(scenario: &Scenario, controller: &str, trace_path: Option<String>) -> PyResult<RunSummary> {
    let kind = parse_controller(controller)?;
    let result = match trace_path {
        None => experiment::run_simulation(&scenario.inner, kind),
        Some(path) => {
            let mut bytes = Vec::new();
            let mut detector = intersim::detection::NoisyDetector::new(
                scenario.inner.noise,
                experiment::noise_rng(scenario.inner.seed),
            );
            let result = experiment::run_with_detector(
                &scenario.inner,
                kind,
                &mut detector,
                Some(&mut bytes),
            );
            if result.is_ok() {
                std::fs::write(&path, bytes)
                    .map_err(|e| PyRuntimeError::new_err(format!("cannot write {path}: {e}")))?;
            }
            result
        }
    };
    result
        .map(|inner| RunSummary { inner })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Paired comparison of both controllers over the given scenarios.
#[pyfunction]
#[pyo3(signature = (scenarios, replications = 5))]
fn compare(scenarios: Vec<Scenario>, replications: u32) -> PyResult<Comparison> {
    let configs: Vec<ScenarioConfig> = scenarios.into_iter().map(|s| s.inner).collect();
    experiment::run_comparison(&configs, replications)
        .map(|inner| Comparison { inner })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Raw green time from per-class counts and average crossing times:
/// sum(count * avg_time) / (no_of_lanes + 1).
#[pyfunction]
fn raw_green_time(
    counts: BTreeMap<String, u32>,
    avg_cross_time: BTreeMap<String, f64>,
    no_of_lanes: u32,
) -> PyResult<f64> {
    if no_of_lanes == 0 {
        return Err(PyValueError::new_err("no_of_lanes must be at least 1"));
    }
    let mut class_counts = PerClass::splat(0u32);
    for (key, value) in &counts {
        let class = VehicleClass::ALL
            .iter()
            .find(|c| c.name() == key)
            .copied()
            .ok_or_else(|| PyValueError::new_err(format!("unknown vehicle class '{key}' in counts")))?;
        class_counts[class] = *value;
    }
    let times = per_class_from_dict(&avg_cross_time, "avg_cross_time")?;
    Ok(signal::raw_green_time(&class_counts, &times, no_of_lanes))
}

/// Clamp a raw green time into [min_green, max_green] and round to a whole
/// second.
#[pyfunction]
fn clamped_green_time(raw: f64, min_green: u32, max_green: u32) -> PyResult<u32> {
    if raw < 0.0 {
        return Err(PyValueError::new_err("raw green time must be non-negative"));
    }
    if min_green == 0 || min_green > max_green {
        return Err(PyValueError::new_err(
            "need 0 < min_green <= max_green",
        ));
    }
    let config = ControllerConfig {
        min_green,
        max_green,
        ..ControllerConfig::default()
    };
    Ok(signal::clamped_green_time(raw, &config))
}

/// Percentage throughput change of adaptive over static.
#[pyfunction]
fn improvement_percent(static_total: f64, adaptive_total: f64) -> PyResult<f64> {
    experiment::improvement_percent(static_total, adaptive_total)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn intersim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Scenario>()?;
    m.add_class::<RunSummary>()?;
    m.add_class::<Comparison>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(raw_green_time, m)?)?;
    m.add_function(wrap_pyfunction!(clamped_green_time, m)?)?;
    m.add_function(wrap_pyfunction!(improvement_percent, m)?)?;
    Ok(())
}
