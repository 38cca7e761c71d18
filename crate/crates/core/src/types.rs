//! Shared vocabulary types: approach directions, vehicle classes, and
//! fixed-size maps keyed by them.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Travel direction of vehicles entering the intersection. Each direction
/// has its own approach road and signal head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Right,
    Down,
    Left,
    Up,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Right,
        Direction::Down,
        Direction::Left,
        Direction::Up,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Right => "right",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Up => "up",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The five vehicle categories the simulator and detector distinguish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleClass {
    Car,
    Motorcycle,
    Bus,
    Truck,
    Rickshaw,
}

impl VehicleClass {
    pub const ALL: [VehicleClass; 5] = [
        VehicleClass::Car,
        VehicleClass::Motorcycle,
        VehicleClass::Bus,
        VehicleClass::Truck,
        VehicleClass::Rickshaw,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            VehicleClass::Car => "car",
            VehicleClass::Motorcycle => "motorcycle",
            VehicleClass::Bus => "bus",
            VehicleClass::Truck => "truck",
            VehicleClass::Rickshaw => "rickshaw",
        }
    }
}

impl fmt::Display for VehicleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value for every vehicle class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerClass<T> {
    pub car: T,
    pub motorcycle: T,
    pub bus: T,
    pub truck: T,
    pub rickshaw: T,
}

impl<T> PerClass<T> {
    pub fn from_fn(mut f: impl FnMut(VehicleClass) -> T) -> Self {
        PerClass {
            car: f(VehicleClass::Car),
            motorcycle: f(VehicleClass::Motorcycle),
            bus: f(VehicleClass::Bus),
            truck: f(VehicleClass::Truck),
            rickshaw: f(VehicleClass::Rickshaw),
        }
    }

    pub fn get(&self, class: VehicleClass) -> &T {
        match class {
            VehicleClass::Car => &self.car,
            VehicleClass::Motorcycle => &self.motorcycle,
            VehicleClass::Bus => &self.bus,
            VehicleClass::Truck => &self.truck,
            VehicleClass::Rickshaw => &self.rickshaw,
        }
    }

    pub fn get_mut(&mut self, class: VehicleClass) -> &mut T {
        match class {
            VehicleClass::Car => &mut self.car,
            VehicleClass::Motorcycle => &mut self.motorcycle,
            VehicleClass::Bus => &mut self.bus,
            VehicleClass::Truck => &mut self.truck,
            VehicleClass::Rickshaw => &mut self.rickshaw,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (VehicleClass, &T)> {
        VehicleClass::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerClass<U> {
        PerClass::from_fn(|c| f(self.get(c)))
    }
}

impl<T: Copy> PerClass<T> {
    /// The same value for every class.
    pub fn splat(value: T) -> Self {
        PerClass::from_fn(|_| value)
    }
}

impl<T> Index<VehicleClass> for PerClass<T> {
    type Output = T;
    fn index(&self, class: VehicleClass) -> &T {
        self.get(class)
    }
}

impl<T> IndexMut<VehicleClass> for PerClass<T> {
    fn index_mut(&mut self, class: VehicleClass) -> &mut T {
        self.get_mut(class)
    }
}

/// A value for every approach direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerDirection<T> {
    pub right: T,
    pub down: T,
    pub left: T,
    pub up: T,
}

impl<T> PerDirection<T> {
    pub fn from_fn(mut f: impl FnMut(Direction) -> T) -> Self {
        PerDirection {
            right: f(Direction::Right),
            down: f(Direction::Down),
            left: f(Direction::Left),
            up: f(Direction::Up),
        }
    }

    pub fn get(&self, direction: Direction) -> &T {
        match direction {
            Direction::Right => &self.right,
            Direction::Down => &self.down,
            Direction::Left => &self.left,
            Direction::Up => &self.up,
        }
    }

    pub fn get_mut(&mut self, direction: Direction) -> &mut T {
        match direction {
            Direction::Right => &mut self.right,
            Direction::Down => &mut self.down,
            Direction::Left => &mut self.left,
            Direction::Up => &mut self.up,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, &T)> {
        Direction::ALL.iter().map(move |&d| (d, self.get(d)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerDirection<U> {
        PerDirection::from_fn(|d| f(self.get(d)))
    }
}

impl<T: Copy> PerDirection<T> {
    pub fn splat(value: T) -> Self {
        PerDirection::from_fn(|_| value)
    }
}

impl<T> Index<Direction> for PerDirection<T> {
    type Output = T;
    fn index(&self, direction: Direction) -> &T {
        self.get(direction)
    }
}

impl<T> IndexMut<Direction> for PerDirection<T> {
    fn index_mut(&mut self, direction: Direction) -> &mut T {
        self.get_mut(direction)
    }
}

/// Physical and timing parameters for one vehicle class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    /// Vehicle length, metres.
    pub length: f64,
    /// Constant travel speed, metres per second.
    pub cruise_speed: f64,
    /// Estimated seconds for one vehicle of this class to clear the
    /// intersection; the per-vehicle weight in the green-time formula.
    pub avg_cross_time: f64,
}

/// Default class parameters. These are calibration inputs, not measured
/// values; scenarios may override any of them.
pub fn default_class_params() -> PerClass<ClassParams> {
    PerClass {
        car: ClassParams {
            length: 4.0,
            cruise_speed: 12.0,
            avg_cross_time: 2.0,
        },
        motorcycle: ClassParams {
            length: 2.0,
            cruise_speed: 13.0,
            avg_cross_time: 1.0,
        },
        bus: ClassParams {
            length: 10.0,
            cruise_speed: 9.0,
            avg_cross_time: 2.5,
        },
        truck: ClassParams {
            length: 10.0,
            cruise_speed: 9.0,
            avg_cross_time: 2.5,
        },
        rickshaw: ClassParams {
            length: 3.0,
            cruise_speed: 10.0,
            avg_cross_time: 2.25,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_five_classes_and_four_directions() {
        assert_eq!(VehicleClass::ALL.len(), 5);
        assert_eq!(Direction::ALL.len(), 4);
    }

    #[test]
    fn default_class_params_are_positive() {
        for (_, p) in default_class_params().iter() {
            assert!(p.length > 0.0);
            assert!(p.cruise_speed > 0.0);
            assert!(p.avg_cross_time > 0.0);
        }
    }

    #[test]
    fn per_class_indexing_matches_fields() {
        let mut counts = PerClass::splat(0u32);
        counts[VehicleClass::Bus] = 7;
        assert_eq!(counts.bus, 7);
        assert_eq!(*counts.get(VehicleClass::Bus), 7);
        assert_eq!(counts.iter().map(|(_, v)| *v).sum::<u32>(), 7);
    }
}
