//! Vehicle-count providers feeding the adaptive controller.
//!
//! The simulator stands in for a camera pipeline: [`GroundTruthDetector`]
//! reads exact waiting counts from the world, and [`NoisyDetector`] wraps
//! them in a configurable error model (per-class Bernoulli thinning plus
//! Poisson false positives). [`DetectionSnapshot`] is the module boundary
//! where a real detection pipeline would plug in.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::Violation;
use crate::sim::{waiting_counts, WorldState};
use crate::types::{Direction, PerClass};

/// Per-class counts of vehicles waiting on one approach at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionSnapshot {
    pub approach: Direction,
    /// Tick at which the snapshot was captured.
    pub tick: u64,
    pub counts: PerClass<u32>,
}

/// Detection error model. Each true vehicle is counted independently with
/// `detect_prob` for its class; spurious detections are added per class as
/// a Poisson draw with mean `false_per_snapshot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub detect_prob: PerClass<f64>,
    pub false_per_snapshot: PerClass<f64>,
}

impl Default for NoiseParams {
    /// Identity noise: every vehicle detected, no false positives.
    fn default() -> Self {
        NoiseParams {
            detect_prob: PerClass::splat(1.0),
            false_per_snapshot: PerClass::splat(0.0),
        }
    }
}

impl NoiseParams {
    pub fn is_identity(&self) -> bool {
        self.detect_prob.iter().all(|(_, &p)| p == 1.0)
            && self.false_per_snapshot.iter().all(|(_, &r)| r == 0.0)
    }

    pub fn violations(&self, prefix: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        for (class, &p) in self.detect_prob.iter() {
            if !(0.0..=1.0).contains(&p) {
                out.push(Violation {
                    field: format!("{prefix}.detect_prob.{class}"),
                    message: format!("probability {p} outside [0, 1]"),
                });
            }
        }
        for (class, &r) in self.false_per_snapshot.iter() {
            if !r.is_finite() || r < 0.0 {
                out.push(Violation {
                    field: format!("{prefix}.false_per_snapshot.{class}"),
                    message: format!("expected count {r} must be finite and non-negative"),
                });
            }
        }
        out
    }
}

/// Exact waiting counts for one approach, read straight from the world.
pub fn ground_truth(world: &WorldState, approach: Direction) -> DetectionSnapshot {
    DetectionSnapshot {
        approach,
        tick: world.tick(),
        counts: waiting_counts(world, approach),
    }
}

/// Apply the noise model to a snapshot. Deterministic given the generator
/// state: one uniform draw per true vehicle, plus one Poisson draw per
/// class with a nonzero false-positive rate.
pub fn apply_noise(
    snapshot: &DetectionSnapshot,
    params: &NoiseParams,
    rng: &mut impl Rng,
) -> DetectionSnapshot {
    let counts = PerClass::from_fn(|class| {
        let p = params.detect_prob[class];
        let mut detected = 0u32;
        for _ in 0..snapshot.counts[class] {
            if rng.random::<f64>() < p {
                detected += 1;
            }
        }
        let rate = params.false_per_snapshot[class];
        if rate > 0.0 {
            let poisson = Poisson::new(rate).expect("validated false-positive rate");
            detected += poisson.sample(rng) as u32;
        }
        detected
    });
    DetectionSnapshot {
        approach: snapshot.approach,
        tick: snapshot.tick,
        counts,
    }
}

/// Reported by a detector that could not produce a snapshot. The controller
/// turns this into a run-aborting error; there is no silent fallback.
#[derive(Debug, Clone)]
pub struct DetectorFailure(pub String);

/// Source of waiting-count snapshots for the adaptive controller.
pub trait Detector {
    fn snapshot(
        &mut self,
        world: &WorldState,
        approach: Direction,
        tick: u64,
    ) -> Result<DetectionSnapshot, DetectorFailure>;
}

/// Detector returning exact simulator counts.
#[derive(Debug, Default, Clone, Copy)]
pub struct GroundTruthDetector;

impl Detector for GroundTruthDetector {
    fn snapshot(
        &mut self,
        world: &WorldState,
        approach: Direction,
        tick: u64,
    ) -> Result<DetectionSnapshot, DetectorFailure> {
        Ok(DetectionSnapshot {
            approach,
            tick,
            counts: waiting_counts(world, approach),
        })
    }
}

/// Detector applying [`NoiseParams`] to ground truth. Owns its own seeded
/// generator so noise draws never disturb the arrival stream.
#[derive(Debug, Clone)]
pub struct NoisyDetector {
    params: NoiseParams,
    rng: ChaCha8Rng,
}

impl NoisyDetector {
    pub fn new(params: NoiseParams, rng: ChaCha8Rng) -> Self {
        NoisyDetector { params, rng }
    }
}

impl Detector for NoisyDetector {
    fn snapshot(
        &mut self,
        world: &WorldState,
        approach: Direction,
        tick: u64,
    ) -> Result<DetectionSnapshot, DetectorFailure> {
        let truth = DetectionSnapshot {
            approach,
            tick,
            counts: waiting_counts(world, approach),
        };
        Ok(apply_noise(&truth, &self.params, &mut self.rng))
    }
}
