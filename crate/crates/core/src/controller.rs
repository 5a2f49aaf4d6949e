//! The Soft-gNB's mobility management: periodic link estimation (vMM),
//! serving-cluster maintenance with hysteresis, downlink path preparation,
//! and the conventional single-link hard handover used as a baseline.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{GnbId, UeId};

/// Estimated quality of one gNB -> UE link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEstimate {
    /// Large-scale link gain including the long-term beamforming gain, dB.
    pub gain_db: f64,
    pub sinr_db: f64,
}

/// The controller's view of a UE's links at the last reporting instant.
#[derive(Debug, Clone, PartialEq)]
pub struct VmmEstimate {
    pub links: BTreeMap<GnbId, LinkEstimate>,
    pub sampled_at: u64,
    /// Slots since `sampled_at`.
    pub staleness: u64,
}

impl VmmEstimate {
    pub fn new(links: BTreeMap<GnbId, LinkEstimate>, slot: u64) -> Self {
        Self {
            links,
            sampled_at: slot,
            staleness: 0,
        }
    }

    /// Estimated SINR, or `-inf` for unmeasured gNBs.
    pub fn sinr(&self, gnb: GnbId) -> f64 {
        self.links.get(&gnb).map_or(f64::NEG_INFINITY, |e| e.sinr_db)
    }

    /// Highest estimated SINR among `candidates`, ties to the lowest id.
    pub fn best_of<I: IntoIterator<Item = GnbId>>(&self, candidates: I) -> Option<GnbId> {
        let mut best: Option<(GnbId, f64)> = None;
        for b in candidates {
            let v = self.sinr(b);
            match best {
                Some((bb, bv)) if v < bv || (v == bv && b > bb) => {}
                _ => best = Some((b, v)),
            }
        }
        best.map(|(b, _)| b)
    }

    /// Best measured gNB overall.
    pub fn best(&self) -> Option<GnbId> {
        self.best_of(self.links.keys().copied())
    }
}

/// Sample-and-hold link estimation with a fixed reporting period.
#[derive(Debug, Clone)]
pub struct Vmm {
    period: u64,
    current: Option<VmmEstimate>,
}

impl Vmm {
    pub fn new(reporting_period: u64) -> Result<Self> {
        if reporting_period < 1 {
            return Err(Error::config("reporting_period_slots", "must be >= 1"));
        }
        Ok(Self {
            period: reporting_period,
            current: None,
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// A fresh measurement is taken at multiples of the period, or on
    /// first use.
    pub fn is_due(&self, slot: u64) -> bool {
        self.current.is_none() || slot.is_multiple_of(self.period)
    }

    /// Returns the estimate valid at `slot`, calling `measure` for the
    /// true link state only when a report is due.
    pub fn refresh<F>(&mut self, slot: u64, measure: F) -> &VmmEstimate
    where
        F: FnOnce() -> BTreeMap<GnbId, LinkEstimate>,
    {
        if self.is_due(slot) {
            self.current = Some(VmmEstimate::new(measure(), slot));
        }
        let est = self.current.as_mut().expect("estimate populated above");
        est.staleness = slot.saturating_sub(est.sampled_at);
        est
    }

    pub fn current(&self) -> Option<&VmmEstimate> {
        self.current.as_ref()
    }
}

/// The gNBs currently prepared to serve one UE.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ServingCluster {
    ue: UeId,
    members: BTreeSet<GnbId>,
    anchor: GnbId,
}

impl ServingCluster {
    pub fn new(ue: UeId, anchor: GnbId) -> Self {
        Self {
            ue,
            members: BTreeSet::from([anchor]),
            anchor,
        }
    }

    pub fn ue(&self) -> UeId {
        self.ue
    }

    pub fn members(&self) -> &BTreeSet<GnbId> {
        &self.members
    }

    pub fn anchor(&self) -> GnbId {
        self.anchor
    }

    pub fn contains(&self, gnb: GnbId) -> bool {
        self.members.contains(&gnb)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeReason {
    EnterThreshold,
    ExitThreshold,
    AnchorChange,
}

/// Membership changes produced by one cluster update.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ClusterUpdate {
    pub slot: u64,
    pub additions: BTreeSet<GnbId>,
    pub removals: BTreeSet<GnbId>,
    /// `(previous, new)` anchor.
    pub anchor_change: Option<(GnbId, GnbId)>,
}

impl ClusterUpdate {
    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.removals.is_empty() && self.anchor_change.is_none()
    }

    pub fn reasons(&self) -> Vec<(GnbId, ChangeReason)> {
        let mut out: Vec<_> = self
            .additions
            .iter()
            .map(|&b| (b, ChangeReason::EnterThreshold))
            .chain(self.removals.iter().map(|&b| (b, ChangeReason::ExitThreshold)))
            .collect();
        if let Some((_, to)) = self.anchor_change {
            out.push((to, ChangeReason::AnchorChange));
        }
        out
    }
}

/// Join/leave thresholds on estimated SINR. Joining needs a strictly
/// higher SINR than staying, so a link between the two keeps its state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterThresholds {
    enter_db: f64,
    exit_db: f64,
    max_size: Option<usize>,
}

impl ClusterThresholds {
    pub fn new(enter_db: f64, exit_db: f64) -> Result<Self> {
        if !(enter_db.is_finite() && exit_db.is_finite()) {
            return Err(Error::config("enter_threshold_db", "thresholds must be finite"));
        }
        if enter_db <= exit_db {
            return Err(Error::config(
                "enter_threshold_db",
                format!("hysteresis rule: enter threshold ({enter_db} dB) must exceed exit threshold ({exit_db} dB)"),
            ));
        }
        Ok(Self {
            enter_db,
            exit_db,
            max_size: None,
        })
    }

    /// Caps the cluster size; `None` means unbounded.
    pub fn with_max_size(mut self, max_size: Option<usize>) -> Result<Self> {
        if max_size == Some(0) {
            return Err(Error::config("max_cluster_size", "must be >= 1"));
        }
        self.max_size = max_size;
        Ok(self)
    }

    pub fn enter_db(&self) -> f64 {
        self.enter_db
    }

    pub fn exit_db(&self) -> f64 {
        self.exit_db
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }
}

/// One cluster maintenance step.
///
/// Members whose estimate drops below the exit threshold leave; eligible
/// non-members at or above the enter threshold join, best first, up to the
/// size cap. If that would leave the cluster empty, the best current member
/// stays. The anchor is then the member with the highest estimate.
pub fn update_cluster<E>(
    cluster: &ServingCluster,
    est: &VmmEstimate,
    thresholds: &ClusterThresholds,
    eligible: E,
    slot: u64,
) -> (ServingCluster, ClusterUpdate)
where
    E: Fn(GnbId) -> bool,
{
    let mut keep: BTreeSet<GnbId> = cluster
        .members
        .iter()
        .copied()
        .filter(|&b| est.sinr(b) >= thresholds.exit_db)
        .collect();

    let mut candidates: Vec<(GnbId, f64)> = est
        .links
        .iter()
        .filter(|(b, e)| !cluster.contains(**b) && e.sinr_db >= thresholds.enter_db && eligible(**b))
        .map(|(&b, e)| (b, e.sinr_db))
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let room = thresholds
        .max_size
        .map_or(usize::MAX, |m| m.saturating_sub(keep.len()));
    let additions: BTreeSet<GnbId> = candidates.into_iter().take(room).map(|(b, _)| b).collect();

    if keep.is_empty() && additions.is_empty() {
        let survivor = est
            .best_of(cluster.members.iter().copied())
            .expect("cluster is never empty");
        keep.insert(survivor);
    }
    let removals: BTreeSet<GnbId> = cluster.members.difference(&keep).copied().collect();
    let members: BTreeSet<GnbId> = keep.union(&additions).copied().collect();
    let anchor = est
        .best_of(members.iter().copied())
        .expect("members non-empty");
    let anchor_change = (anchor != cluster.anchor).then_some((cluster.anchor, anchor));

    (
        ServingCluster {
            ue: cluster.ue,
            members,
            anchor,
        },
        ClusterUpdate {
            slot,
            additions,
            removals,
            anchor_change,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preparation {
    /// Path set up; the gNB may join from `eligible_from` on.
    Prepared { eligible_from: u64 },
    /// Nothing to do: the gNB already serves the UE.
    AlreadyMember,
}

/// Downlink paths set up toward prospective cluster members. Preparing
/// takes one slot.
#[derive(Debug, Clone, Default)]
pub struct PathPreparation {
    prepared_at: BTreeMap<GnbId, u64>,
}

impl PathPreparation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prepare(&mut self, gnb: GnbId, cluster: &ServingCluster, slot: u64) -> Preparation {
        if cluster.contains(gnb) {
            return Preparation::AlreadyMember;
        }
        let at = *self.prepared_at.entry(gnb).or_insert(slot);
        Preparation::Prepared { eligible_from: at + 1 }
    }

    pub fn is_ready(&self, gnb: GnbId, slot: u64) -> bool {
        self.prepared_at.get(&gnb).is_some_and(|&at| at < slot)
    }

    /// Tears the path down, e.g. after the gNB leaves the cluster.
    pub fn release(&mut self, gnb: GnbId) {
        self.prepared_at.remove(&gnb);
    }
}

/// A change of the UE's primary serving gNB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HandoverEvent {
    pub ue: UeId,
    pub from: GnbId,
    pub to: GnbId,
    pub slot: u64,
    /// Slots, starting at `slot`, during which the UE cannot receive.
    pub interruption_slots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoverPolicy {
    pub hysteresis_db: f64,
    pub interruption_slots: u64,
    /// Minimum spacing between consecutive handovers.
    pub time_to_trigger_slots: u64,
}

impl Default for HandoverPolicy {
    fn default() -> Self {
        Self {
            hysteresis_db: 3.0,
            interruption_slots: 50,
            time_to_trigger_slots: 100,
        }
    }
}

/// Hard handover decision for a single serving link.
///
/// Triggers when the best other gNB beats the current one by more than the
/// hysteresis and at least `time_to_trigger_slots` have passed since the
/// previous handover.
pub fn baseline_handover(
    ue: UeId,
    current: GnbId,
    est: &VmmEstimate,
    policy: &HandoverPolicy,
    last_handover: Option<u64>,
    slot: u64,
) -> Option<HandoverEvent> {
    if let Some(last) = last_handover {
        if slot.saturating_sub(last) < policy.time_to_trigger_slots {
            return None;
        }
    }
    let target = est.best_of(est.links.keys().copied().filter(|&b| b != current))?;
    if est.sinr(target) > est.sinr(current) + policy.hysteresis_db {
        Some(HandoverEvent {
            ue,
            from: current,
            to: target,
            slot,
            interruption_slots: policy.interruption_slots,
        })
    } else {
        None
    }
}

/// Serving state of the single-link baseline.
#[derive(Debug, Clone)]
pub struct BaselineLink {
    ue: UeId,
    serving: GnbId,
    last_handover: Option<u64>,
    interrupted_until: u64,
}

impl BaselineLink {
    pub fn new(ue: UeId, serving: GnbId) -> Self {
        Self {
            ue,
            serving,
            last_handover: None,
            interrupted_until: 0,
        }
    }

    pub fn serving(&self) -> GnbId {
        self.serving
    }

    pub fn step(&mut self, est: &VmmEstimate, policy: &HandoverPolicy, slot: u64) -> Option<HandoverEvent> {
        let ev = baseline_handover(self.ue, self.serving, est, policy, self.last_handover, slot)?;
        self.serving = ev.to;
        self.last_handover = Some(slot);
        self.interrupted_until = slot + ev.interruption_slots;
        Some(ev)
    }

    pub fn in_interruption(&self, slot: u64) -> bool {
        slot < self.interrupted_until
    }
}
