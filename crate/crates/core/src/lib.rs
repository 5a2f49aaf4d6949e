//! Slotted-time simulator for a centrally coordinated millimeter-wave downlink.
//!
//! A single controller (the SDN-enabled "Soft-gNB") tracks a mobile UE, keeps
//! a serving cluster of gNBs prepared for it, and the downlink is evaluated
//! either through that cluster (redundant copies, selection combining) or
//! through a conventional single-gNB link with hard handovers.
//!
//! Module map:
//!
//! - [`channel`]: path loss, shadowing, multipath channel matrices, DFT
//!   codebook beam search, link budget, noise, interference and SINR.
//! - [`topology`]: gNB/UE placement, near sets and the binary association
//!   algebra (activity, association and clustering indicators).
//! - [`mobility`]: polyline trajectories and the per-slot UE position update.
//! - [`controller`]: vMM link estimation, serving-cluster maintenance, path
//!   preparation and the hard-handover baseline.
//! - [`engine`]: scenario definition, the per-slot world loop, and the
//!   speed x scheme x seed sweep with aggregated metrics.

pub mod channel;
pub mod controller;
pub mod engine;
pub mod error;
pub mod mobility;
pub mod topology;

pub use error::{Error, Result};

pub use channel::{
    AntennaArrayConfig, BeamChoice, BeamCodebook, ChannelMatrix, FadingProcess, LinkBudget,
    PathLossParams, ShadowField, SinrReport, Subpath, SubpathSet,
};
pub use controller::{ClusterThresholds, ClusterUpdate, HandoverEvent, ServingCluster, VmmEstimate};
pub use engine::{Metrics, Scenario, Scheme, SlotOutcome, SweepResult, SummaryRow};
pub use mobility::{MobilityState, Trajectory};
pub use topology::{AssociationState, Gnb, GnbId, NearSet, Point, Ue, UeId};
