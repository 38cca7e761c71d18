//! Signal phase state machine and the two timing controllers.
//!
//! The intersection serves one approach at a time, cycling through a fixed
//! order. The fixed-time controller gives every phase the same green
//! duration. The adaptive controller sizes the next green from a detector
//! snapshot of the next approach, taken `detection_lead` seconds before the
//! current green ends so the result is ready at the switch:
//!
//! ```text
//! green = sum over classes (count * avg_cross_time) / (no_of_lanes + 1)
//! ```
//!
//! clamped to `[min_green, max_green]` and rounded to a whole second.

use serde::{Deserialize, Serialize};

use crate::detection::{Detector, DetectionSnapshot};
use crate::error::{SimError, Violation};
use crate::sim::{WorldState, TICKS_PER_SECOND};
use crate::types::{Direction, PerClass, PerDirection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalColor {
    Red,
    Yellow,
    Green,
}

impl SignalColor {
    pub fn name(self) -> &'static str {
        match self {
            SignalColor::Red => "red",
            SignalColor::Yellow => "yellow",
            SignalColor::Green => "green",
        }
    }
}

impl std::fmt::Display for SignalColor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which timing policy drives the intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Every green phase lasts `static_green` seconds, regardless of traffic.
    Static,
    /// Green durations are computed from detector counts.
    Adaptive,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Static => "static",
            ControllerKind::Adaptive => "adaptive",
        }
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Timing parameters shared by both controllers. All durations are whole
/// seconds; timers advance on the simulation tick grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Green duration of the very first phase, before any detection result
    /// exists.
    pub default_green: u32,
    /// Yellow duration between green and red.
    pub yellow_time: u32,
    /// Lower clamp for adaptive green durations.
    pub min_green: u32,
    /// Upper clamp for adaptive green durations.
    pub max_green: u32,
    /// Green duration used for every phase by the fixed-time controller.
    pub static_green: u32,
    /// How many seconds before the end of the current green the next
    /// approach's snapshot is captured.
    pub detection_lead: u32,
    /// Through lanes per approach. This is the denominator input of the
    /// green-time formula; the simulated road adds one rightmost turn lane
    /// on top of it.
    pub no_of_lanes: u32,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            default_green: 20,
            yellow_time: 5,
            min_green: 10,
            max_green: 60,
            static_green: 30,
            detection_lead: 5,
            no_of_lanes: 2,
        }
    }
}

impl ControllerConfig {
    /// Collect every violated constraint, named by field.
    pub fn violations(&self, prefix: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |field: &str, message: String| {
            out.push(Violation {
                field: format!("{prefix}.{field}"),
                message,
            })
        };
        if self.min_green == 0 {
            push("min_green", "must be at least 1 second".into());
        }
        if self.min_green > self.max_green {
            push(
                "min_green",
                format!(
                    "must not exceed max_green ({} > {})",
                    self.min_green, self.max_green
                ),
            );
        }
        if self.detection_lead > self.min_green {
            push(
                "detection_lead",
                format!(
                    "must not exceed min_green ({} > {})",
                    self.detection_lead, self.min_green
                ),
            );
        }
        if self.no_of_lanes == 0 {
            push("no_of_lanes", "must be at least 1".into());
        }
        if self.yellow_time == 0 {
            push("yellow_time", "must be at least 1 second".into());
        }
        if self.default_green == 0 {
            push("default_green", "must be at least 1 second".into());
        }
        if self.static_green == 0 {
            push("static_green", "must be at least 1 second".into());
        }
        out
    }

    fn yellow_ticks(&self) -> u64 {
        self.yellow_time as u64 * TICKS_PER_SECOND
    }
}

/// Externally visible state of one signal head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalState {
    pub color: SignalColor,
    /// Seconds until the next transition. `None` for a red signal whose
    /// schedule ahead is not yet staged ("pending").
    pub remaining: Option<f64>,
}

/// Emitted whenever a signal changes color; these become trace records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalCommand {
    pub tick: u64,
    pub direction: Direction,
    pub color: SignalColor,
    /// Seconds the new color will hold, when already known at emit time.
    pub duration: Option<u32>,
}

/// The four signals' states plus the cyclic phase pointer.
///
/// Exactly one direction holds green or yellow at any time; the other three
/// are red. Timers are stored as absolute ticks so countdown state derives
/// exactly from the current tick.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlan {
    colors: PerDirection<SignalColor>,
    /// Direction currently holding green or yellow.
    pub current: Direction,
    /// Service order; `current` advances through it cyclically.
    pub cycle_order: [Direction; 4],
    /// Absolute tick at which the current green or yellow ends.
    active_until: u64,
    /// For red signals, the absolute tick of their next green onset, when
    /// the schedule up to it is fully known.
    green_onset: PerDirection<Option<u64>>,
    /// Clamped green duration staged for the next direction by the most
    /// recent capture. Consumed at the yellow-to-red switch.
    pub next_green_duration: Option<u32>,
}

impl PhasePlan {
    /// Initial plan: the first direction in `cycle_order` starts green, all
    /// others red. Returns the commands describing the initial states.
    pub fn new(
        config: &ControllerConfig,
        kind: ControllerKind,
        cycle_order: [Direction; 4],
    ) -> (Self, Vec<SignalCommand>) {
        let first = cycle_order[0];
        let first_green = match kind {
            ControllerKind::Static => config.static_green,
            ControllerKind::Adaptive => config.default_green,
        };
        let mut plan = PhasePlan {
            colors: PerDirection::from_fn(|d| {
                if d == first {
                    SignalColor::Green
                } else {
                    SignalColor::Red
                }
            }),
            current: first,
            cycle_order,
            active_until: first_green as u64 * TICKS_PER_SECOND,
            green_onset: PerDirection::splat(None),
            next_green_duration: None,
        };
        plan.recompute_red_onsets(config, kind, 0);
        let mut commands = vec![SignalCommand {
            tick: 0,
            direction: first,
            color: SignalColor::Green,
            duration: Some(first_green),
        }];
        for &d in &cycle_order[1..] {
            commands.push(SignalCommand {
                tick: 0,
                direction: d,
                color: SignalColor::Red,
                duration: plan.red_duration_secs(d, 0),
            });
        }
        (plan, commands)
    }

    pub fn color(&self, direction: Direction) -> SignalColor {
        self.colors[direction]
    }

    /// The direction served after `direction` in the cycle.
    pub fn next_after(&self, direction: Direction) -> Direction {
        let i = self
            .cycle_order
            .iter()
            .position(|&d| d == direction)
            .expect("direction present in cycle order");
        self.cycle_order[(i + 1) % 4]
    }

    /// Absolute tick at which the active signal leaves its current color.
    pub fn active_until(&self) -> u64 {
        self.active_until
    }

    /// Seconds left on the active signal at `tick`.
    pub fn active_remaining(&self, tick: u64) -> f64 {
        (self.active_until.saturating_sub(tick)) as f64 / TICKS_PER_SECOND as f64
    }

    /// Signal head view at `tick`: color plus countdown.
    pub fn signal_state(&self, direction: Direction, tick: u64) -> SignalState {
        let color = self.colors[direction];
        let remaining = match color {
            SignalColor::Green | SignalColor::Yellow => Some(self.active_remaining(tick)),
            SignalColor::Red => self.green_onset[direction]
                .map(|onset| onset.saturating_sub(tick) as f64 / TICKS_PER_SECOND as f64),
        };
        SignalState { color, remaining }
    }

    fn red_duration_secs(&self, direction: Direction, tick: u64) -> Option<u32> {
        self.green_onset[direction]
            .map(|onset| (onset.saturating_sub(tick) / TICKS_PER_SECOND) as u32)
    }

    /// Stage the clamped green duration for the next direction and update
    /// red timers that become determined by it.
    pub fn stage_next_green(
        &mut self,
        seconds: u32,
        config: &ControllerConfig,
        kind: ControllerKind,
        tick: u64,
    ) {
        self.next_green_duration = Some(seconds);
        self.recompute_red_onsets(config, kind, tick);
    }

    /// Switch the expired signal: green goes yellow; yellow goes red and
    /// hands green to the next direction in the cycle, using the staged
    /// duration when present. Red timers are recomputed from the now-known
    /// schedule.
    ///
    /// Errors if called while the active signal still has time remaining.
    pub fn advance(
        &mut self,
        config: &ControllerConfig,
        kind: ControllerKind,
        tick: u64,
    ) -> Result<Vec<SignalCommand>, SimError> {
        if tick != self.active_until {
            return Err(SimError::AdvanceBeforeExpiry {
                tick,
                remaining: self.active_remaining(tick),
            });
        }
        let mut commands = Vec::new();
        match self.colors[self.current] {
            SignalColor::Green => {
                self.colors[self.current] = SignalColor::Yellow;
                self.active_until = tick + config.yellow_ticks();
                commands.push(SignalCommand {
                    tick,
                    direction: self.current,
                    color: SignalColor::Yellow,
                    duration: Some(config.yellow_time),
                });
                self.recompute_red_onsets(config, kind, tick);
            }
            SignalColor::Yellow => {
                let ending = self.current;
                let next = self.next_after(ending);
                let green = self.next_green_duration.take().unwrap_or(match kind {
                    ControllerKind::Static => config.static_green,
                    ControllerKind::Adaptive => config.default_green,
                });
                self.colors[ending] = SignalColor::Red;
                self.colors[next] = SignalColor::Green;
                self.current = next;
                self.active_until = tick + green as u64 * TICKS_PER_SECOND;
                self.recompute_red_onsets(config, kind, tick);
                commands.push(SignalCommand {
                    tick,
                    direction: ending,
                    color: SignalColor::Red,
                    duration: self.red_duration_secs(ending, tick),
                });
                commands.push(SignalCommand {
                    tick,
                    direction: next,
                    color: SignalColor::Green,
                    duration: Some(green),
                });
            }
            SignalColor::Red => unreachable!("the current direction is never red"),
        }
        Ok(commands)
    }

    /// Recompute every red signal's next green onset from the schedule as
    /// currently known. Future phases whose durations are neither staged
    /// nor implied by the fixed-time policy stay pending.
    fn recompute_red_onsets(&mut self, config: &ControllerConfig, kind: ControllerKind, _tick: u64) {
        // Onset of the next green: end of the current green plus yellow, or
        // end of the current yellow.
        let mut onset = match self.colors[self.current] {
            SignalColor::Green => self.active_until + config.yellow_ticks(),
            SignalColor::Yellow => self.active_until,
            SignalColor::Red => unreachable!("the current direction is never red"),
        };
        self.green_onset[self.current] = None;
        let mut known = true;
        let mut direction = self.next_after(self.current);
        for step in 0..3 {
            self.green_onset[direction] = if known { Some(onset) } else { None };
            let green = if step == 0 {
                self.next_green_duration.or(match kind {
                    ControllerKind::Static => Some(config.static_green),
                    ControllerKind::Adaptive => None,
                })
            } else {
                match kind {
                    ControllerKind::Static => Some(config.static_green),
                    ControllerKind::Adaptive => None,
                }
            };
            match green {
                Some(g) => onset += (g + config.yellow_time) as u64 * TICKS_PER_SECOND,
                None => known = false,
            }
            direction = self.next_after(direction);
        }
    }
}

/// Raw green signal time from per-class waiting counts: the sum of
/// count times average crossing time over all classes, divided by the
/// number of lanes plus one. Pure; clamping is a separate step.
pub fn raw_green_time(
    counts: &PerClass<u32>,
    avg_cross_time: &PerClass<f64>,
    no_of_lanes: u32,
) -> f64 {
    debug_assert!(no_of_lanes >= 1);
    let weighted: f64 = counts
        .iter()
        .map(|(class, &n)| n as f64 * avg_cross_time[class])
        .sum();
    weighted / (no_of_lanes + 1) as f64
}

/// Clamp a raw green time into `[min_green, max_green]` and round to the
/// nearest whole second (timers tick in whole seconds).
pub fn clamped_green_time(raw: f64, config: &ControllerConfig) -> u32 {
    debug_assert!(raw >= 0.0);
    raw.max(config.min_green as f64)
        .min(config.max_green as f64)
        .round() as u32
}

/// Seconds until the next approach's snapshot should be captured, given the
/// remaining green: `detection_lead` seconds before the green ends, floored
/// at zero ("capture now") when the green is already shorter than the lead.
pub fn capture_instant(green_remaining: f64, config: &ControllerConfig) -> f64 {
    (green_remaining - config.detection_lead as f64).max(0.0)
}

/// Output of one controller tick: signal changes plus the detector snapshot
/// captured this tick, if any.
#[derive(Debug, Default)]
pub struct TickOutput {
    pub commands: Vec<SignalCommand>,
    pub capture: Option<DetectionSnapshot>,
}

/// Drives a [`PhasePlan`] once per simulation tick, scheduling detector
/// captures and phase switches.
#[derive(Debug)]
pub struct SignalController {
    pub kind: ControllerKind,
    pub config: ControllerConfig,
    pub plan: PhasePlan,
    avg_cross_time: PerClass<f64>,
    /// Absolute tick of the pending capture for the current green, if any.
    capture_tick: Option<u64>,
}

impl SignalController {
    pub fn new(
        kind: ControllerKind,
        config: ControllerConfig,
        avg_cross_time: PerClass<f64>,
        cycle_order: [Direction; 4],
    ) -> (Self, Vec<SignalCommand>) {
        let (plan, commands) = PhasePlan::new(&config, kind, cycle_order);
        let mut controller = SignalController {
            kind,
            config,
            plan,
            avg_cross_time,
            capture_tick: None,
        };
        controller.schedule_capture(0);
        (controller, commands)
    }

    fn schedule_capture(&mut self, green_onset: u64) {
        self.capture_tick = match self.kind {
            ControllerKind::Static => None,
            ControllerKind::Adaptive => {
                let green_remaining = self.plan.active_remaining(green_onset);
                let wait = capture_instant(green_remaining, &self.config);
                Some(green_onset + (wait * TICKS_PER_SECOND as f64).round() as u64)
            }
        };
    }

    fn try_capture(
        &mut self,
        world: &WorldState,
        detector: &mut dyn Detector,
        tick: u64,
    ) -> Result<Option<DetectionSnapshot>, SimError> {
        if self.capture_tick != Some(tick) || self.plan.color(self.plan.current) != SignalColor::Green
        {
            return Ok(None);
        }
        self.capture_tick = None;
        let target = self.plan.next_after(self.plan.current);
        let snapshot = detector
            .snapshot(world, target, tick)
            .map_err(|failure| SimError::Detector {
                tick,
                approach: target,
                message: failure.0,
            })?;
        let raw = raw_green_time(&snapshot.counts, &self.avg_cross_time, self.config.no_of_lanes);
        let staged = clamped_green_time(raw, &self.config);
        self.plan.stage_next_green(staged, &self.config, self.kind, tick);
        Ok(Some(snapshot))
    }

    /// One simulation tick. The adaptive controller captures the next
    /// approach's snapshot at the scheduled instant and stages the clamped
    /// green time; both controllers switch phases when the active timer
    /// expires. The fixed-time controller never touches the detector.
    pub fn tick(
        &mut self,
        world: &WorldState,
        detector: &mut dyn Detector,
        tick: u64,
    ) -> Result<TickOutput, SimError> {
        let mut out = TickOutput {
            commands: Vec::new(),
            capture: self.try_capture(world, detector, tick)?,
        };
        if tick == self.plan.active_until {
            let was_yellow = self.plan.color(self.plan.current) == SignalColor::Yellow;
            out.commands = self.plan.advance(&self.config, self.kind, tick)?;
            if was_yellow {
                // A new green just started; schedule its capture, which can
                // fall on this very tick when the green is not longer than
                // the detection lead.
                self.schedule_capture(tick);
                if out.capture.is_none() {
                    out.capture = self.try_capture(world, detector, tick)?;
                }
            }
        }
        Ok(out)
    }
}
