//! Scenario configuration, per-run world state and the Monte-Carlo sweep.

mod scenario;
pub mod seed;
pub mod stats;
mod sweep;
mod world;

pub use scenario::{
    kmh_to_mps, NearMetricKind, PreseededAssociation, Scenario, Scheme, SchemeSelection, TrajectoryKeyword,
    TrajectorySpec,
};
pub use sweep::{run_scenario, run_single, Metrics, SummaryRow, SweepOptions, SweepResult, TraceEvent, TraceKind};
pub use world::{evaluate_transmission, BackgroundLoad, Cause, RunSpec, SlotOutcome, World, MOBILE_UE};
