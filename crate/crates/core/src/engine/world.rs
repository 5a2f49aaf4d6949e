use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scenario::{kmh_to_mps, NearMetricKind, Scenario, Scheme};
use super::seed;
use crate::channel::{
    evolve_fading_in_place, interference_at, path_loss, received_power, sinr, BeamCodebook, FadingProcess,
    LinkBeamGeometry, PathLossParams, ShadowField, SinrReport, SubpathSet,
};
use crate::controller::{
    update_cluster, BaselineLink, ClusterThresholds, ClusterUpdate, HandoverEvent, HandoverPolicy, LinkEstimate,
    PathPreparation, ServingCluster, Vmm, VmmEstimate,
};
use crate::error::{Error, Result};
use crate::mobility::{MobilityState, Trajectory};
use crate::topology::{compute_near_set, AssociationState, Gnb, GnbId, NearMetric, NearSet, Ue, UeId};

/// The mobile UE tracked by every run.
pub const MOBILE_UE: UeId = UeId(0);

/// Identifies one independent run and its random streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub speed_kmh: f64,
    pub scheme: Scheme,
    pub run: u64,
    pub world_seed: u64,
    pub dynamics_seed: u64,
}

impl RunSpec {
    pub fn derive(base_seed: u64, speed_kmh: f64, scheme: Scheme, run: u64) -> Self {
        Self {
            speed_kmh,
            scheme,
            run,
            world_seed: seed::world_seed(base_seed, run),
            dynamics_seed: seed::run_seed(base_seed, speed_kmh, scheme, run),
        }
    }
}

/// Busy/idle state of the gNBs' own (static) user populations.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundLoad {
    pub users_per_gnb: Vec<u32>,
    pub activity: f64,
}

impl BackgroundLoad {
    pub fn new(users_per_gnb: Vec<u32>, activity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&activity) {
            return Err(Error::config("background_activity", "must lie in [0, 1]"));
        }
        Ok(Self {
            users_per_gnb,
            activity,
        })
    }

    /// One Bernoulli draw per gNB; gNBs without users are never busy.
    /// Exactly one uniform variate is consumed per gNB.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, active: &mut [bool]) {
        for (slot, &users) in active.iter_mut().zip(&self.users_per_gnb) {
            let u: f64 = rng.random();
            *slot = users > 0 && u < self.activity;
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let mut out = vec![false; self.users_per_gnb.len()];
        self.draw_into(rng, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cause {
    Ok,
    BelowThreshold,
    HandoverInterruption,
}

/// What happened to the downlink packet of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub slot: u64,
    /// One report per serving link.
    pub links: Vec<(GnbId, SinrReport)>,
    pub packet_success: bool,
    pub cause: Cause,
    pub cluster_update: Option<ClusterUpdate>,
    pub handover: Option<HandoverEvent>,
}

impl SlotOutcome {
    pub fn serving_count(&self) -> usize {
        self.links.len()
    }
}

/// Multi-scheme success: any redundant copy clears the threshold.
/// Single-scheme success additionally requires no active interruption.
pub fn evaluate_transmission<'a, I>(scheme: Scheme, reports: I, interrupted: bool) -> (bool, Cause)
where
    I: IntoIterator<Item = &'a SinrReport>,
{
    let interrupted = scheme == Scheme::Single && interrupted;
    if interrupted {
        return (false, Cause::HandoverInterruption);
    }
    if reports.into_iter().any(|r| r.satisfied) {
        (true, Cause::Ok)
    } else {
        (false, Cause::BelowThreshold)
    }
}

#[derive(Debug, Clone)]
struct LinkState {
    gnb: GnbId,
    shadow_db: f64,
    subpaths: SubpathSet,
    gains: Vec<Complex64>,
    geometry: LinkBeamGeometry,
}

#[derive(Debug, Clone)]
enum Serving {
    Cluster {
        cluster: ServingCluster,
        prep: PathPreparation,
        /// `(estimate slot, eligible mask)` of the last update that changed nothing.
        settled: Option<(u64, u64)>,
    },
    Single(BaselineLink),
}

/// Complete state of one run.
#[derive(Debug, Clone)]
pub struct World {
    spec: RunSpec,
    total_slots: u64,
    slot: u64,

    tx_power_dbm: f64,
    delta_db: f64,
    noise_dbm: f64,
    min_sinr_db: f64,
    sidelobe_penalty_db: f64,
    path_loss: PathLossParams,
    thresholds: ClusterThresholds,
    handover: HandoverPolicy,
    slot_duration_s: f64,
    near_set_size: usize,
    near_metric: NearMetricKind,

    gnbs: Vec<Gnb>,
    ue: Ue,
    trajectory: Trajectory,
    mobility: MobilityState,
    links: Vec<LinkState>,
    fading: FadingProcess,
    background: BackgroundLoad,
    rng: ChaCha8Rng,
    vmm: Vmm,
    serving: Option<Serving>,
    association: AssociationState,

    active: Vec<bool>,
    pathloss_db: Vec<f64>,
    aligned_dbm: Vec<f64>,
    serving_buf: Vec<GnbId>,
}

impl World {
    pub fn new(scenario: &Scenario, spec: RunSpec) -> Result<Self> {
        scenario.check()?;
        let speed = kmh_to_mps(spec.speed_kmh);
        let gnbs = scenario.gnbs()?;
        let trajectory = scenario.trajectory(speed)?;
        let total_slots = scenario.slots_for(spec.speed_kmh)?;
        let arrays = scenario.arrays();
        let codebook = BeamCodebook::dft(&arrays);

        let mut world_rng = ChaCha8Rng::seed_from_u64(spec.world_seed);
        let ids: Vec<GnbId> = gnbs.iter().map(|g| g.id).collect();
        let shadow = ShadowField::draw(&ids, &[MOBILE_UE], scenario.shadow_sigma_db, &mut world_rng);
        let links = ids
            .iter()
            .map(|&gnb| {
                let subpaths = SubpathSet::draw(scenario.subpaths, &mut world_rng)?;
                let geometry = LinkBeamGeometry::new(&subpaths, &arrays, &codebook)?;
                let gains = subpaths.subpaths.iter().map(|p| p.gain).collect();
                Ok(LinkState {
                    gnb,
                    shadow_db: shadow.get(gnb, MOBILE_UE),
                    subpaths,
                    gains,
                    geometry,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mobility = MobilityState::start(&trajectory);
        let n = gnbs.len();
        Ok(Self {
            spec,
            total_slots,
            slot: 0,
            tx_power_dbm: scenario.tx_power_dbm,
            delta_db: scenario.subpath_attenuation_db,
            noise_dbm: scenario.noise_dbm()?,
            min_sinr_db: scenario.min_sinr_db,
            sidelobe_penalty_db: scenario.sidelobe_penalty_db,
            path_loss: scenario.path_loss_params(),
            thresholds: scenario.thresholds()?,
            handover: scenario.handover_policy(),
            slot_duration_s: scenario.slot_duration_s,
            near_set_size: scenario.near_set_size,
            near_metric: scenario.near_metric,
            ue: Ue {
                id: MOBILE_UE,
                position: mobility.position,
                speed,
            },
            gnbs,
            trajectory,
            mobility,
            links,
            fading: FadingProcess::from_motion(speed, scenario.carrier_hz(), scenario.slot_duration_s)?,
            background: BackgroundLoad::new(vec![scenario.users_per_cell; n], scenario.background_activity)?,
            rng: ChaCha8Rng::seed_from_u64(spec.dynamics_seed),
            vmm: Vmm::new(scenario.reporting_period_slots)?,
            serving: None,
            association: AssociationState::new(1, n),
            active: vec![false; n],
            pathloss_db: vec![0.0; n],
            aligned_dbm: vec![0.0; n],
            serving_buf: Vec::with_capacity(n),
        })
    }

    pub fn spec(&self) -> &RunSpec {
        &self.spec
    }

    pub fn total_slots(&self) -> u64 {
        self.total_slots
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn is_finished(&self) -> bool {
        self.slot >= self.total_slots
    }

    pub fn ue(&self) -> &Ue {
        &self.ue
    }

    pub fn fading(&self) -> &FadingProcess {
        &self.fading
    }

    pub fn association(&self) -> &AssociationState {
        &self.association
    }

    /// Current serving gNBs, anchor first for the cluster scheme.
    pub fn serving_set(&self) -> Vec<GnbId> {
        let mut v = Vec::new();
        self.fill_serving(&mut v);
        v
    }

    fn fill_serving(&self, out: &mut Vec<GnbId>) {
        out.clear();
        match &self.serving {
            None => {}
            Some(Serving::Single(link)) => out.push(link.serving()),
            Some(Serving::Cluster { cluster, .. }) => {
                out.push(cluster.anchor());
                out.extend(cluster.members().iter().copied().filter(|&b| b != cluster.anchor()));
            }
        }
    }

    /// Estimates as the vMM would sample them right now.
    fn measure(&self, near: &NearSet) -> BTreeMap<GnbId, LinkEstimate> {
        near.ids()
            .map(|b| {
                let i = b.0 as usize;
                let gain_db = self.links[i].geometry.long_term().gain_db - self.delta_db - self.pathloss_db[i];
                let interference = interference_at(
                    self.links.iter().map(|l| (l.gnb, self.aligned_dbm[l.gnb.0 as usize])),
                    |c| self.active[c.0 as usize],
                    |c| c == b,
                    self.sidelobe_penalty_db,
                );
                let report = sinr(self.tx_power_dbm + gain_db, interference, self.noise_dbm, self.min_sinr_db);
                (
                    b,
                    LinkEstimate {
                        gain_db,
                        sinr_db: report.sinr_db,
                    },
                )
            })
            .collect()
    }

    fn near_set(&self) -> Result<NearSet> {
        match self.near_metric {
            NearMetricKind::Distance => compute_near_set(&self.ue, &self.gnbs, NearMetric::Distance, self.near_set_size),
            NearMetricKind::ChannelGain => {
                let gains: BTreeMap<GnbId, f64> = self
                    .links
                    .iter()
                    .map(|l| (l.gnb, self.aligned_dbm[l.gnb.0 as usize]))
                    .collect();
                compute_near_set(&self.ue, &self.gnbs, NearMetric::ChannelGain(&gains), self.near_set_size)
            }
        }
    }

    /// Advances one slot: mobility, fading, background activity, vMM
    /// refresh, controller update, then the downlink attempt.
    pub fn run_slot(&mut self) -> Result<SlotOutcome> {
        let slot = self.slot;

        self.mobility = self.mobility.step(&self.trajectory, self.slot_duration_s);
        self.ue.position = self.mobility.position;

        for link in &mut self.links {
            evolve_fading_in_place(&mut link.subpaths, &self.fading, &mut self.rng);
            for (g, p) in link.gains.iter_mut().zip(&link.subpaths.subpaths) {
                *g = p.gain;
            }
        }

        self.background.draw_into(&mut self.rng, &mut self.active);

        for (i, link) in self.links.iter().enumerate() {
            let d = self.gnbs[i].position.distance(&self.ue.position);
            let pl = path_loss(&self.path_loss, d, link.shadow_db)?;
            self.pathloss_db[i] = pl;
            self.aligned_dbm[i] = self.tx_power_dbm + link.geometry.long_term().gain_db - self.delta_db - pl;
        }

        let near = self.near_set()?;
        if self.vmm.is_due(slot) {
            let sample = self.measure(&near);
            self.vmm.refresh(slot, move || sample);
        } else {
            self.vmm.refresh(slot, BTreeMap::new);
        }
        let est: &VmmEstimate = self.vmm.current().expect("refreshed above");

        let mut cluster_update = None;
        let mut handover = None;
        match &mut self.serving {
            None => {
                let first = est.best().ok_or_else(|| Error::Internal("no gNB measured at attach".into()))?;
                self.serving = Some(match self.spec.scheme {
                    Scheme::Single => Serving::Single(BaselineLink::new(MOBILE_UE, first)),
                    Scheme::Multi => Serving::Cluster {
                        cluster: ServingCluster::new(MOBILE_UE, first),
                        prep: PathPreparation::new(),
                        settled: None,
                    },
                });
                if let Some(Serving::Cluster { cluster, prep, .. }) = &mut self.serving {
                    for b in near.ids() {
                        prep.prepare(b, cluster, slot);
                    }
                }
            }
            Some(Serving::Single(link)) => {
                handover = link.step(est, &self.handover, slot);
            }
            Some(Serving::Cluster { cluster, prep, settled }) => {
                for b in near.ids() {
                    prep.prepare(b, cluster, slot);
                }
                let eligible = |b: GnbId| prep.is_ready(b, slot);
                let mask = self
                    .links
                    .iter()
                    .filter(|l| eligible(l.gnb))
                    .fold(0u64, |m, l| m | 1u64.checked_shl(l.gnb.0).unwrap_or(0));
                // Skip inputs that already produced an empty update.
                let key = (est.sampled_at, mask);
                if self.links.len() > 64 || *settled != Some(key) {
                    let (next, update) = update_cluster(cluster, est, &self.thresholds, eligible, slot);
                    for &b in &update.removals {
                        prep.release(b);
                    }
                    if let Some((from, to)) = update.anchor_change {
                        handover = Some(HandoverEvent {
                            ue: MOBILE_UE,
                            from,
                            to,
                            slot,
                            interruption_slots: 0,
                        });
                    }
                    *cluster = next;
                    if update.is_empty() {
                        *settled = Some(key);
                    } else {
                        *settled = None;
                        cluster_update = Some(update);
                    }
                }
            }
        }

        let mut serving = std::mem::take(&mut self.serving_buf);
        self.fill_serving(&mut serving);
        self.association.set_associations(MOBILE_UE, serving.iter().copied());
        self.association.set_feasible(MOBILE_UE, near.ids().chain(serving.iter().copied()));
        self.association.refresh_activity();
        let violations = self.association.validate_constraints();
        if !violations.is_empty() {
            return Err(Error::InvariantViolation {
                slot,
                invariant: "association-constraints",
                detail: violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            });
        }
        if serving.is_empty() {
            return Err(Error::InvariantViolation {
                slot,
                invariant: "serving-cluster-non-empty",
                detail: "no gNB serves the UE".into(),
            });
        }

        let interference = interference_at(
            self.links.iter().map(|l| (l.gnb, self.aligned_dbm[l.gnb.0 as usize])),
            |b| self.active[b.0 as usize],
            |b| serving.contains(&b),
            self.sidelobe_penalty_db,
        );
        let links: Vec<(GnbId, SinrReport)> = serving
            .iter()
            .map(|&b| {
                let i = b.0 as usize;
                let link = &self.links[i];
                let psi = link.geometry.best_pair(&link.gains).gain_db;
                let budget = received_power(self.tx_power_dbm, psi, self.delta_db, self.pathloss_db[i]);
                (b, sinr(budget.rx_power_dbm, interference, self.noise_dbm, self.min_sinr_db))
            })
            .collect();

        let interrupted = match &self.serving {
            Some(Serving::Single(link)) => link.in_interruption(slot),
            _ => false,
        };
        let (packet_success, cause) = evaluate_transmission(self.spec.scheme, links.iter().map(|(_, r)| r), interrupted);
        if self.spec.scheme == Scheme::Multi && cause == Cause::HandoverInterruption {
            return Err(Error::InvariantViolation {
                slot,
                invariant: "zero-interruption-under-cluster",
                detail: "interruption flagged under the multi-gNB scheme".into(),
            });
        }

        self.serving_buf = serving;
        self.slot += 1;
        Ok(SlotOutcome {
            slot,
            links,
            packet_success,
            cause,
            cluster_update,
            handover,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(sinr_db: f64) -> SinrReport {
        SinrReport {
            sinr_db,
            interference_dbm: f64::NEG_INFINITY,
            noise_dbm: -84.0,
            satisfied: sinr_db >= -10.0,
        }
    }

    #[test]
    fn selection_combining() {
        let (ok, cause) = evaluate_transmission(Scheme::Multi, &[report(-12.0), report(-8.0)], false);
        assert!(ok);
        assert_eq!(cause, Cause::Ok);
        let (ok, cause) = evaluate_transmission(Scheme::Multi, &[report(-12.0), report(-11.0)], false);
        assert!(!ok);
        assert_eq!(cause, Cause::BelowThreshold);
    }

    #[test]
    fn interruption_dominates_single() {
        let (ok, cause) = evaluate_transmission(Scheme::Single, &[report(3.0)], true);
        assert!(!ok);
        assert_eq!(cause, Cause::HandoverInterruption);
    }

    #[test]
    fn background_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let never = BackgroundLoad::new(vec![100; 3], 0.0).unwrap();
        let always = BackgroundLoad::new(vec![100; 3], 1.0).unwrap();
        for _ in 0..1000 {
            assert!(never.draw(&mut rng).iter().all(|a| !a));
            assert!(always.draw(&mut rng).iter().all(|a| *a));
        }
        let empty = BackgroundLoad::new(vec![0; 3], 1.0).unwrap();
        assert!(empty.draw(&mut rng).iter().all(|a| !a));
        assert!(BackgroundLoad::new(vec![1], 1.5).is_err());
    }

    #[test]
    fn background_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let load = BackgroundLoad::new(vec![100; 3], 0.5).unwrap();
        let n = 100_000;
        let mut counts = [0u32; 3];
        for _ in 0..n {
            for (c, a) in counts.iter_mut().zip(load.draw(&mut rng)) {
                *c += a as u32;
            }
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn centre_ue_on_static_channel_succeeds() {
        let s = Scenario {
            trajectory: super::super::scenario::TrajectorySpec::Waypoints {
                waypoints: vec![[200.0, 1.0], [200.0, 2.0]],
            },
            speed_sweep: vec![0.0],
            total_slots: Some(50),
            shadow_sigma_db: 0.0,
            background_activity: 0.0,
            ..Scenario::default()
        };
        let mut w = World::new(&s, RunSpec::derive(0, 0.0, Scheme::Single, 0)).unwrap();
        assert_eq!(w.fading().correlation(), 1.0);
        let first = w.run_slot().unwrap();
        assert_eq!(first.links[0].0, GnbId(1));
        assert!(first.links[0].1.sinr_db > 10.0);
        assert!(first.packet_success);
    }

    #[test]
    fn hopeless_link_fails_below_threshold() {
        let s = Scenario {
            tx_power_dbm: -60.0,
            total_slots: Some(20),
            ..Scenario::default()
        };
        for scheme in Scheme::ALL {
            let mut w = World::new(&s, RunSpec::derive(0, 60.0, scheme, 0)).unwrap();
            while !w.is_finished() {
                let o = w.run_slot().unwrap();
                assert!(!o.packet_success);
                assert_eq!(o.cause, Cause::BelowThreshold);
            }
        }
    }
}
