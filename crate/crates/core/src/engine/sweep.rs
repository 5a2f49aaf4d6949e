use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Scenario, Scheme};
use super::stats;
use super::world::{Cause, RunSpec, World};
use crate::controller::{ChangeReason, ClusterUpdate, HandoverEvent};
use crate::error::Result;
use crate::topology::GnbId;

/// Per-run counters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub speed_kmh: f64,
    pub scheme: Scheme,
    pub run: u64,
    pub transmitted: u64,
    pub succeeded: u64,
    pub success_rate: f64,
    pub handovers: u64,
    pub mean_cluster_size: f64,
    pub interruption_slots: u64,
    pub below_threshold_slots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceKind {
    Attach {
        gnb: GnbId,
    },
    ClusterUpdate {
        additions: Vec<GnbId>,
        removals: Vec<GnbId>,
        anchor_change: Option<(GnbId, GnbId)>,
        reasons: Vec<(GnbId, ChangeReason)>,
    },
    Handover {
        from: GnbId,
        to: GnbId,
        interruption_slots: u64,
    },
}

/// One line of the optional event trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub speed_kmh: f64,
    pub scheme: Scheme,
    pub run: u64,
    pub slot: u64,
    #[serde(flatten)]
    pub kind: TraceKind,
}

/// Aggregate over all seeds for one (speed, scheme) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub speed_kmh: f64,
    pub scheme: Scheme,
    pub seeds: usize,
    pub success_rate_mean: f64,
    pub success_rate_stderr: f64,
    pub handovers_mean: f64,
    pub cluster_size_mean: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOptions {
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by speed, then scheme, then run.
    pub runs: Vec<Metrics>,
    pub rows: Vec<SummaryRow>,
    pub events: Vec<TraceEvent>,
}

impl SweepResult {
    pub fn row(&self, speed_kmh: f64, scheme: Scheme) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.speed_kmh.to_bits() == speed_kmh.to_bits())
    }

    /// Per-seed success rates for one (speed, scheme), in run order.
    pub fn success_rates(&self, speed_kmh: f64, scheme: Scheme) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|m| m.scheme == scheme && m.speed_kmh.to_bits() == speed_kmh.to_bits())
            .map(|m| m.success_rate)
            .collect()
    }
}

fn update_event(spec: &RunSpec, update: &ClusterUpdate) -> TraceEvent {
    TraceEvent {
        speed_kmh: spec.speed_kmh,
        scheme: spec.scheme,
        run: spec.run,
        slot: update.slot,
        kind: TraceKind::ClusterUpdate {
            additions: update.additions.iter().copied().collect(),
            removals: update.removals.iter().copied().collect(),
            anchor_change: update.anchor_change,
            reasons: update.reasons(),
        },
    }
}

fn handover_event(spec: &RunSpec, h: &HandoverEvent) -> TraceEvent {
    TraceEvent {
        speed_kmh: spec.speed_kmh,
        scheme: spec.scheme,
        run: spec.run,
        slot: h.slot,
        kind: TraceKind::Handover {
            from: h.from,
            to: h.to,
            interruption_slots: h.interruption_slots,
        },
    }
}

/// Runs one world to completion.
pub fn run_single(scenario: &Scenario, spec: RunSpec, trace: bool) -> Result<(Metrics, Vec<TraceEvent>)> {
    let mut world = World::new(scenario, spec)?;
    let mut events = Vec::new();
    let mut succeeded = 0u64;
    let mut handovers = 0u64;
    let mut serving_total = 0u64;
    let mut interruption_slots = 0u64;
    let mut below_threshold_slots = 0u64;
    while !world.is_finished() {
        let outcome = world.run_slot()?;
        if trace && outcome.slot == 0 {
            events.push(TraceEvent {
                speed_kmh: spec.speed_kmh,
                scheme: spec.scheme,
                run: spec.run,
                slot: 0,
                kind: TraceKind::Attach {
                    gnb: outcome.links[0].0,
                },
            });
        }
        succeeded += outcome.packet_success as u64;
        serving_total += outcome.serving_count() as u64;
        match outcome.cause {
            Cause::Ok => {}
            Cause::BelowThreshold => below_threshold_slots += 1,
            Cause::HandoverInterruption => interruption_slots += 1,
        }
        if let Some(h) = &outcome.handover {
            handovers += 1;
            if trace {
                events.push(handover_event(&spec, h));
            }
        }
        if trace {
            if let Some(u) = &outcome.cluster_update {
                events.push(update_event(&spec, u));
            }
        }
    }
    let transmitted = world.total_slots();
    let n = transmitted.max(1) as f64;
    Ok((
        Metrics {
            speed_kmh: spec.speed_kmh,
            scheme: spec.scheme,
            run: spec.run,
            transmitted,
            succeeded,
            success_rate: succeeded as f64 / n,
            handovers,
            mean_cluster_size: serving_total as f64 / n,
            interruption_slots,
            below_threshold_slots,
        },
        events,
    ))
}

fn summarize(speed_kmh: f64, scheme: Scheme, runs: &[Metrics]) -> SummaryRow {
    let rates: Vec<f64> = runs.iter().map(|m| m.success_rate).collect();
    let hos: Vec<f64> = runs.iter().map(|m| m.handovers as f64).collect();
    let sizes: Vec<f64> = runs.iter().map(|m| m.mean_cluster_size).collect();
    SummaryRow {
        speed_kmh,
        scheme,
        seeds: runs.len(),
        success_rate_mean: stats::mean(&rates),
        success_rate_stderr: stats::std_error(&rates),
        handovers_mean: stats::mean(&hos),
        cluster_size_mean: stats::mean(&sizes),
    }
}

/// Every (speed, scheme, run) combination of the scenario, executed in
/// parallel on the current rayon pool. Results do not depend on the
/// number of worker threads.
pub fn run_scenario(scenario: &Scenario, options: &SweepOptions) -> Result<SweepResult> {
    scenario.check()?;
    let speeds = scenario.sorted_speeds();
    let schemes = scenario.scheme.schemes();
    let jobs: Vec<RunSpec> = speeds
        .iter()
        .flat_map(|&v| {
            schemes
                .iter()
                .flat_map(move |&s| (0..scenario.seeds).map(move |r| RunSpec::derive(scenario.seed, v, s, r)))
        })
        .collect();

    let outputs = jobs
        .par_iter()
        .map(|&spec| run_single(scenario, spec, options.trace))
        .collect::<Result<Vec<_>>>()?;

    let mut runs = Vec::with_capacity(outputs.len());
    let mut events = Vec::new();
    for (m, e) in outputs {
        runs.push(m);
        events.extend(e);
    }

    let per_group = scenario.seeds as usize;
    let rows = runs
        .chunks(per_group.max(1))
        .filter(|c| !c.is_empty())
        .map(|c| summarize(c[0].speed_kmh, c[0].scheme, c))
        .collect();
    Ok(SweepResult { runs, rows, events })
}
