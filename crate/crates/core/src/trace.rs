//! Machine-readable event trace: one JSON object per line.
//!
//! Every record carries `event` and `tick`. The five record kinds:
//!
//! ```text
//! {"event":"signal","tick":0,"direction":"right","color":"green","duration":20}
//! {"event":"spawn","tick":7,"vehicle":0,"approach":"up","class":"car","lane":2,"will_turn":true}
//! {"event":"capture","tick":150,"approach":"down","counts":{"car":3,...}}
//! {"event":"cross","tick":210,"vehicle":0,"approach":"up","class":"car"}
//! {"event":"exit","tick":480,"vehicle":0,"approach":"up","class":"car"}
//! ```
//!
//! `duration` is in whole seconds and is omitted (`null`) for a red signal
//! whose schedule is not yet known. Field order is stable, so identical
//! runs produce byte-identical traces.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::detection::DetectionSnapshot;
use crate::signal::{SignalColor, SignalCommand};
use crate::sim::{VehicleEvent, VehicleEventKind};
use crate::types::{Direction, PerClass, VehicleClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Signal {
        tick: u64,
        direction: Direction,
        color: SignalColor,
        duration: Option<u32>,
    },
    Spawn {
        tick: u64,
        vehicle: u64,
        approach: Direction,
        class: VehicleClass,
        lane: usize,
        will_turn: bool,
    },
    Capture {
        tick: u64,
        approach: Direction,
        counts: PerClass<u32>,
    },
    Cross {
        tick: u64,
        vehicle: u64,
        approach: Direction,
        class: VehicleClass,
    },
    Exit {
        tick: u64,
        vehicle: u64,
        approach: Direction,
        class: VehicleClass,
    },
}

impl TraceEvent {
    pub fn from_command(command: &SignalCommand) -> Self {
        TraceEvent::Signal {
            tick: command.tick,
            direction: command.direction,
            color: command.color,
            duration: command.duration,
        }
    }

    pub fn from_capture(snapshot: &DetectionSnapshot) -> Self {
        TraceEvent::Capture {
            tick: snapshot.tick,
            approach: snapshot.approach,
            counts: snapshot.counts,
        }
    }

    pub fn from_vehicle_event(tick: u64, event: &VehicleEvent) -> Self {
        match event.kind {
            VehicleEventKind::Crossed => TraceEvent::Cross {
                tick,
                vehicle: event.vehicle,
                approach: event.approach,
                class: event.class,
            },
            VehicleEventKind::Exited => TraceEvent::Exit {
                tick,
                vehicle: event.vehicle,
                approach: event.approach,
                class: event.class,
            },
        }
    }

    pub fn tick(&self) -> u64 {
        match *self {
            TraceEvent::Signal { tick, .. }
            | TraceEvent::Spawn { tick, .. }
            | TraceEvent::Capture { tick, .. }
            | TraceEvent::Cross { tick, .. }
            | TraceEvent::Exit { tick, .. } => tick,
        }
    }
}

/// Write one trace record as a JSON line.
pub fn write_event(writer: &mut dyn Write, event: &TraceEvent) -> io::Result<()> {
    serde_json::to_writer(&mut *writer, event)?;
    writer.write_all(b"\n")
}

/// Parse a trace back from its line-delimited form (used by tests and
/// external tooling).
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_lines_round_trip() {
        let events = vec![
            TraceEvent::Signal {
                tick: 0,
                direction: Direction::Right,
                color: SignalColor::Green,
                duration: Some(20),
            },
            TraceEvent::Signal {
                tick: 0,
                direction: Direction::Left,
                color: SignalColor::Red,
                duration: None,
            },
            TraceEvent::Spawn {
                tick: 7,
                vehicle: 0,
                approach: Direction::Up,
                class: VehicleClass::Rickshaw,
                lane: 2,
                will_turn: true,
            },
            TraceEvent::Capture {
                tick: 150,
                approach: Direction::Down,
                counts: PerClass::splat(1),
            },
        ];
        let mut buffer = Vec::new();
        for e in &events {
            write_event(&mut buffer, e).unwrap();
        }
        let text = String::from_utf8(buffer).unwrap();
        assert_eq!(text.lines().count(), events.len());
        assert_eq!(parse_trace(&text).unwrap(), events);
    }

    #[test]
    fn signal_line_format_is_stable() {
        let mut buffer = Vec::new();
        write_event(
            &mut buffer,
            &TraceEvent::Signal {
                tick: 0,
                direction: Direction::Right,
                color: SignalColor::Green,
                duration: Some(20),
            },
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buffer).unwrap(),
            "{\"event\":\"signal\",\"tick\":0,\"direction\":\"right\",\"color\":\"green\",\"duration\":20}\n"
        );
    }
}
