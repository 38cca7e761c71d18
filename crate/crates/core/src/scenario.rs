//! Scenario configuration: the full parameter set for one simulation run.
//!
//! Scenario files are TOML; field names mirror this type one to one, and
//! every field has a documented default so a minimal file can state only
//! what it changes. Validation collects every violated constraint with its
//! field path rather than stopping at the first.

use serde::{Deserialize, Serialize};

use crate::detection::NoiseParams;
use crate::error::{ConfigError, Violation};
use crate::signal::ControllerConfig;
use crate::types::{default_class_params, ClassParams, PerClass};

/// Order of `arrival_weights` entries: right, down, left, up.
pub const ARRIVAL_WEIGHT_ORDER: &str = "right, down, left, up";
/// Order of `class_mix` entries: car, motorcycle, bus, truck, rickshaw.
pub const CLASS_MIX_ORDER: &str = "car, motorcycle, bus, truck, rickshaw";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Simulated seconds per run.
    pub duration: f64,
    /// Probability that an arrival lands on each approach, in the order
    /// right, down, left, up. Must sum to 1.
    pub arrival_weights: [f64; 4],
    /// Per-tick probability of one arrival entering the world.
    pub p_arrival: f64,
    /// Class mix of arrivals, in the order car, motorcycle, bus, truck,
    /// rickshaw. Must sum to 1.
    pub class_mix: [f64; 5],
    /// Probability that a vehicle spawned in the rightmost lane turns.
    pub turn_probability: f64,
    pub controller: ControllerConfig,
    pub noise: NoiseParams,
    /// Seed for the run's deterministic generators.
    pub seed: u64,
    /// Per-class physical and timing parameters (calibration inputs).
    pub classes: PerClass<ClassParams>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".to_string(),
            duration: 300.0,
            arrival_weights: [0.25; 4],
            p_arrival: 0.10,
            class_mix: [0.55, 0.20, 0.08, 0.07, 0.10],
            turn_probability: 0.25,
            controller: ControllerConfig::default(),
            noise: NoiseParams::default(),
            seed: 42,
            classes: default_class_params(),
        }
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl ScenarioConfig {
    /// Parse a scenario from TOML text, then validate it.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse {
                path: "<inline>".into(),
                message: e.to_string(),
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Check every invariant; on failure, return all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.name.is_empty() {
            out.push(Violation {
                field: "name".into(),
                message: "must not be empty".into(),
            });
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            out.push(Violation {
                field: "duration".into(),
                message: format!("{} is not a positive duration", self.duration),
            });
        }
        check_weights(
            &mut out,
            "arrival_weights",
            &self.arrival_weights,
            ARRIVAL_WEIGHT_ORDER,
        );
        check_weights(&mut out, "class_mix", &self.class_mix, CLASS_MIX_ORDER);
        check_probability(&mut out, "p_arrival", self.p_arrival);
        check_probability(&mut out, "turn_probability", self.turn_probability);
        out.extend(self.controller.violations("controller"));
        out.extend(self.noise.violations("noise"));
        for (class, params) in self.classes.iter() {
            let field = |name: &str| format!("classes.{class}.{name}");
            let positive = |v: f64| v.is_finite() && v > 0.0;
            if !positive(params.length) {
                out.push(Violation {
                    field: field("length"),
                    message: format!("{} must be positive", params.length),
                });
            }
            if !positive(params.cruise_speed) {
                out.push(Violation {
                    field: field("cruise_speed"),
                    message: format!("{} must be positive", params.cruise_speed),
                });
            }
            if !positive(params.avg_cross_time) {
                out.push(Violation {
                    field: field("avg_cross_time"),
                    message: format!("{} must be positive", params.avg_cross_time),
                });
            }
        }
        out
    }

    /// Ticks in one run of this scenario.
    pub fn ticks(&self) -> u64 {
        (self.duration * crate::sim::TICKS_PER_SECOND as f64).round() as u64
    }

    /// Copy of this scenario with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut scenario = self.clone();
        scenario.seed = seed;
        scenario
    }
}

fn check_weights(out: &mut Vec<Violation>, field: &str, weights: &[f64], order: &str) {
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || !(0.0..=1.0).contains(&w) {
            out.push(Violation {
                field: format!("{field}[{i}]"),
                message: format!("weight {w} outside [0, 1] (order: {order})"),
            });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        out.push(Violation {
            field: field.to_string(),
            message: format!("weights sum to {sum}, expected 1 (order: {order})"),
        });
    }
}

fn check_probability(out: &mut Vec<Violation>, field: &str, p: f64) {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        out.push(Violation {
            field: field.to_string(),
            message: format!("probability {p} outside [0, 1]"),
        });
    }
}
