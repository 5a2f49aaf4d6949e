//! Constant-speed motion along a polyline, advanced once per slot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{Gnb, Point};

/// Lateral offset of the default path, as a fraction of the cell radius.
pub const EDGE_OFFSET_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    waypoints: Vec<Point>,
    /// m/s, constant for the run.
    speed: f64,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Point>, speed: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::config("trajectory", "need at least two waypoints"));
        }
        if waypoints.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::config("trajectory", "waypoints must be finite"));
        }
        if let Some(i) = waypoints.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::config(
                "trajectory",
                format!("waypoints {i} and {} coincide", i + 1),
            ));
        }
        if !(speed >= 0.0 && speed.is_finite()) {
            return Err(Error::config("speed", format!("must be >= 0, got {speed}")));
        }
        Ok(Self { waypoints, speed })
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn with_speed(&self, speed: f64) -> Result<Self> {
        Self::new(self.waypoints.clone(), speed)
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Slots needed to reach the last waypoint, or `None` when stationary.
    pub fn traversal_slots(&self, slot_duration: f64) -> Option<u64> {
        if self.speed == 0.0 {
            return None;
        }
        let exact = self.length() / (self.speed * slot_duration);
        Some((exact - 1e-6).ceil().max(1.0) as u64)
    }
}

const SNAP_M: f64 = 1e-9;

/// Position along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityState {
    pub position: Point,
    pub segment: usize,
    /// Distance already covered within the current segment.
    pub offset: f64,
    /// Total path length covered.
    pub travelled: f64,
    /// Slots stepped.
    pub elapsed: u64,
}

impl MobilityState {
    pub fn start(traj: &Trajectory) -> Self {
        Self {
            position: traj.waypoints[0],
            segment: 0,
            offset: 0.0,
            travelled: 0.0,
            elapsed: 0,
        }
    }

    pub fn at_end(&self, traj: &Trajectory) -> bool {
        self.segment + 1 >= traj.waypoints.len()
    }

    /// Moves `speed * slot_duration` along the polyline, stopping at the
    /// final waypoint.
    pub fn step(&self, traj: &Trajectory, slot_duration: f64) -> Self {
        let mut next = *self;
        next.elapsed += 1;
        let mut remaining = traj.speed * slot_duration;
        let wp = &traj.waypoints;
        while remaining > 0.0 && next.segment + 1 < wp.len() {
            let (a, b) = (wp[next.segment], wp[next.segment + 1]);
            let seg_len = a.distance(&b);
            let left = seg_len - next.offset;
            if remaining < left - SNAP_M {
                next.offset += remaining;
                next.travelled += remaining;
                remaining = 0.0;
                let f = next.offset / seg_len;
                next.position = Point::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y));
            } else {
                remaining -= left;
                next.travelled += left;
                next.segment += 1;
                next.offset = 0.0;
                next.position = b;
            }
        }
        next
    }
}

/// A straight path parallel to the gNB row, `offset_factor * cell_radius`
/// off the row axis, from one radius before the first cell to one radius
/// past the last.
pub fn default_edge_trajectory(gnbs: &[Gnb], cell_radius: f64, offset_factor: f64, speed: f64) -> Result<Trajectory> {
    if gnbs.len() < 2 {
        return Err(Error::config("trajectory", "auto-edge path needs at least two gNBs in a row"));
    }
    let min_x = gnbs.iter().map(|g| g.position.x).fold(f64::INFINITY, f64::min);
    let max_x = gnbs.iter().map(|g| g.position.x).fold(f64::NEG_INFINITY, f64::max);
    let row_y = gnbs.iter().map(|g| g.position.y).sum::<f64>() / gnbs.len() as f64;
    let y = row_y + offset_factor * cell_radius;
    Trajectory::new(
        vec![Point::new(min_x - cell_radius, y), Point::new(max_x + cell_radius, y)],
        speed,
    )
}
