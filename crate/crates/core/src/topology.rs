//! Node population and the binary gNB/UE association indicators.
//!
//! Three indicator families describe who serves whom:
//! activity (`alpha_b`, is the gNB serving anyone), association
//! (`beta_ub`, is gNB `b` in UE `u`'s serving cluster) and clustering
//! (`N_ub`, is `(u, b)` a feasible pairing, i.e. `b` is in `u`'s near set).
//! Activity is fully determined by the other two through
//! `alpha_b = 1 - prod_u (1 - beta_ub N_ub)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GnbId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UeId(pub u32);

impl fmt::Display for GnbId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gNB{}", self.0)
    }
}

impl fmt::Display for UeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UE{}", self.0)
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gnb {
    pub id: GnbId,
    pub position: Point,
    pub is_soft_gnb: bool,
    pub cell_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub id: UeId,
    pub position: Point,
    /// m/s
    pub speed: f64,
}

/// Places `count` tangent cells in a row along the x axis, the first at
/// the origin, and flags the middle one as the Soft-gNB.
pub fn place_grid(count: usize, cell_radius: f64) -> Result<Vec<Gnb>> {
    if count < 1 {
        return Err(Error::config("gnb_count", "need at least one gNB"));
    }
    if !(cell_radius > 0.0 && cell_radius.is_finite()) {
        return Err(Error::config("cell_radius_m", "must be > 0"));
    }
    let soft = (count - 1) / 2;
    Ok((0..count)
        .map(|i| Gnb {
            id: GnbId(i as u32),
            position: Point::new(2.0 * cell_radius * i as f64, 0.0),
            is_soft_gnb: i == soft,
            cell_radius,
        })
        .collect())
}

/// Checks id uniqueness and that exactly one Soft-gNB exists.
pub fn validate_layout(gnbs: &[Gnb]) -> Result<()> {
    let ids: BTreeSet<_> = gnbs.iter().map(|g| g.id).collect();
    if ids.len() != gnbs.len() {
        return Err(Error::config("gnbs", "gNB ids must be unique"));
    }
    let soft = gnbs.iter().filter(|g| g.is_soft_gnb).count();
    if soft != 1 {
        return Err(Error::config("gnbs", format!("expected exactly one Soft-gNB, found {soft}")));
    }
    Ok(())
}

/// How near-set members are ranked.
#[derive(Debug, Clone, Copy)]
pub enum NearMetric<'a> {
    /// Euclidean distance, smaller is better.
    Distance,
    /// Link gain in dB, larger is better. gNBs missing from the map rank last.
    ChannelGain(&'a BTreeMap<GnbId, f64>),
}

/// A UE's candidate serving gNBs, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct NearSet {
    pub ue: UeId,
    /// `(gnb, metric value)`, best first, ties by lowest id.
    pub members: Vec<(GnbId, f64)>,
}

impl NearSet {
    pub fn contains(&self, gnb: GnbId) -> bool {
        self.members.iter().any(|&(b, _)| b == gnb)
    }

    pub fn ids(&self) -> impl Iterator<Item = GnbId> + '_ {
        self.members.iter().map(|&(b, _)| b)
    }

    pub fn best(&self) -> GnbId {
        self.members[0].0
    }
}

/// The `k` best gNBs for `ue` under `metric` (`k` is clamped to the
/// population size).
pub fn compute_near_set(ue: &Ue, gnbs: &[Gnb], metric: NearMetric<'_>, k: usize) -> Result<NearSet> {
    if gnbs.is_empty() {
        return Err(Error::InvalidInput("near set needs at least one gNB".into()));
    }
    if k < 1 {
        return Err(Error::InvalidInput("near set size must be >= 1".into()));
    }
    let mut scored: Vec<(GnbId, f64)> = gnbs
        .iter()
        .map(|g| {
            let value = match metric {
                NearMetric::Distance => g.position.distance(&ue.position),
                NearMetric::ChannelGain(gains) => gains.get(&g.id).copied().unwrap_or(f64::NEG_INFINITY),
            };
            (g.id, value)
        })
        .collect();
    match metric {
        NearMetric::Distance => scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))),
        NearMetric::ChannelGain(_) => scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))),
    }
    scored.truncate(k.min(gnbs.len()));
    Ok(NearSet { ue: ue.id, members: scored })
}

/// A broken association constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// `alpha_b >= beta_ub N_ub` fails: the gNB serves `ue` but is idle.
    ActivityBound { ue: UeId, gnb: GnbId },
    /// `sum_b beta_ub N_ub >= 1` fails: nobody serves `ue`.
    Uncovered { ue: UeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ActivityBound { ue, gnb } => {
                write!(f, "activity bound: {gnb} serves {ue} but is marked inactive")
            }
            Violation::Uncovered { ue } => write!(f, "coverage: {ue} has no serving gNB"),
        }
    }
}

/// Indicator matrices for `ues x gnbs`. Ids are dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationState {
    gnbs: usize,
    ues: usize,
    activity: Vec<bool>,
    association: Vec<bool>,
    clustering: Vec<bool>,
}

impl AssociationState {
    /// All indicators zero.
    pub fn new(ues: usize, gnbs: usize) -> Self {
        Self {
            gnbs,
            ues,
            activity: vec![false; gnbs],
            association: vec![false; ues * gnbs],
            clustering: vec![false; ues * gnbs],
        }
    }

    /// Builds a state from explicit rows (`association[u][b]`, `clustering[u][b]`).
    pub fn from_indicators(activity: Vec<bool>, association: Vec<Vec<bool>>, clustering: Vec<Vec<bool>>) -> Result<Self> {
        let gnbs = activity.len();
        let ues = association.len();
        if clustering.len() != ues {
            return Err(Error::config("association.clustering", "row count differs from association"));
        }
        for (name, rows) in [("association.association", &association), ("association.clustering", &clustering)] {
            if let Some((u, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != gnbs) {
                return Err(Error::config(
                    name,
                    format!("row {u} has {} entries, expected {gnbs}", r.len()),
                ));
            }
        }
        Ok(Self {
            gnbs,
            ues,
            activity,
            association: association.into_iter().flatten().collect(),
            clustering: clustering.into_iter().flatten().collect(),
        })
    }

    pub fn gnb_count(&self) -> usize {
        self.gnbs
    }

    pub fn ue_count(&self) -> usize {
        self.ues
    }

    fn idx(&self, ue: UeId, gnb: GnbId) -> usize {
        let (u, b) = (ue.0 as usize, gnb.0 as usize);
        assert!(u < self.ues && b < self.gnbs, "({ue}, {gnb}) out of range");
        u * self.gnbs + b
    }

    pub fn activity(&self, gnb: GnbId) -> bool {
        self.activity[gnb.0 as usize]
    }

    pub fn set_activity(&mut self, gnb: GnbId, on: bool) {
        self.activity[gnb.0 as usize] = on;
    }

    pub fn association(&self, ue: UeId, gnb: GnbId) -> bool {
        self.association[self.idx(ue, gnb)]
    }

    pub fn set_association(&mut self, ue: UeId, gnb: GnbId, on: bool) {
        let i = self.idx(ue, gnb);
        self.association[i] = on;
    }

    pub fn clustering(&self, ue: UeId, gnb: GnbId) -> bool {
        self.clustering[self.idx(ue, gnb)]
    }

    pub fn set_clustering(&mut self, ue: UeId, gnb: GnbId, on: bool) {
        let i = self.idx(ue, gnb);
        self.clustering[i] = on;
    }

    /// Replaces a UE's association row with exactly `members`.
    pub fn set_associations<I: IntoIterator<Item = GnbId>>(&mut self, ue: UeId, members: I) {
        for b in 0..self.gnbs {
            self.set_association(ue, GnbId(b as u32), false);
        }
        for b in members {
            self.set_association(ue, b, true);
        }
    }

    /// Replaces a UE's clustering row with exactly `feasible`.
    pub fn set_feasible<I: IntoIterator<Item = GnbId>>(&mut self, ue: UeId, feasible: I) {
        for b in 0..self.gnbs {
            self.set_clustering(ue, GnbId(b as u32), false);
        }
        for b in feasible {
            self.set_clustering(ue, b, true);
        }
    }

    /// `beta_ub * N_ub`
    pub fn serves(&self, ue: UeId, gnb: GnbId) -> bool {
        let i = self.idx(ue, gnb);
        self.association[i] && self.clustering[i]
    }

    /// Recomputes activity from `alpha_b = 1 - prod_u (1 - beta_ub N_ub)`.
    pub fn derive_activity(&self) -> Self {
        let mut next = self.clone();
        next.refresh_activity();
        next
    }

    /// In-place form of [`derive_activity`](Self::derive_activity).
    pub fn refresh_activity(&mut self) {
        for b in 0..self.gnbs {
            let product: u8 = (0..self.ues)
                .map(|u| {
                    let i = u * self.gnbs + b;
                    1 - (self.association[i] as u8 * self.clustering[i] as u8)
                })
                .product();
            self.activity[b] = 1 - product == 1;
        }
    }

    /// Every broken constraint, activity-bound violations first in
    /// `(ue, gnb)` order, then uncovered UEs.
    pub fn validate_constraints(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for u in 0..self.ues {
            for b in 0..self.gnbs {
                let (ue, gnb) = (UeId(u as u32), GnbId(b as u32));
                if self.serves(ue, gnb) && !self.activity(gnb) {
                    out.push(Violation::ActivityBound { ue, gnb });
                }
            }
        }
        for u in 0..self.ues {
            let ue = UeId(u as u32);
            if !(0..self.gnbs).any(|b| self.serves(ue, GnbId(b as u32))) {
                out.push(Violation::Uncovered { ue });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ue_at(x: f64, y: f64) -> Ue {
        Ue {
            id: UeId(0),
            position: Point::new(x, y),
            speed: 0.0,
        }
    }

    #[test]
    fn grid_single_cell() {
        let g = place_grid(1, 100.0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_soft_gnb);
        assert_eq!(g[0].position, Point::new(0.0, 0.0));
    }

    #[test]
    fn grid_three_cells() {
        let g = place_grid(3, 100.0).unwrap();
        let xs: Vec<f64> = g.iter().map(|g| g.position.x).collect();
        assert_eq!(xs, vec![0.0, 200.0, 400.0]);
        assert!(g.iter().all(|g| g.position.y == 0.0));
        let soft: Vec<_> = g.iter().filter(|g| g.is_soft_gnb).map(|g| g.id).collect();
        assert_eq!(soft, vec![GnbId(1)]);
        validate_layout(&g).unwrap();
    }

    #[test]
    fn grid_rejects_zero() {
        assert!(place_grid(0, 100.0).is_err());
        assert!(place_grid(3, 0.0).is_err());
    }

    #[test]
    fn layout_validation() {
        let mut g = place_grid(3, 100.0).unwrap();
        g[0].is_soft_gnb = true;
        assert!(validate_layout(&g).is_err());
        let mut g = place_grid(3, 100.0).unwrap();
        g[2].id = GnbId(0);
        assert!(validate_layout(&g).is_err());
    }

    #[test]
    fn near_set_colocated() {
        let g = place_grid(3, 100.0).unwrap();
        let ns = compute_near_set(&ue_at(200.0, 0.0), &g, NearMetric::Distance, 1).unwrap();
        assert_eq!(ns.ids().collect::<Vec<_>>(), vec![GnbId(1)]);
        assert_eq!(ns.members[0].1, 0.0);
    }

    #[test]
    fn near_set_tie_breaks_low_id() {
        let g = place_grid(2, 100.0).unwrap();
        let ns = compute_near_set(&ue_at(100.0, 37.0), &g, NearMetric::Distance, 1).unwrap();
        assert_eq!(ns.best(), GnbId(0));
    }

    #[test]
    fn near_set_line() {
        let g: Vec<Gnb> = [50.0, 100.0, 150.0]
            .iter()
            .enumerate()
            .map(|(i, &x)| Gnb {
                id: GnbId(i as u32),
                position: Point::new(x, 0.0),
                is_soft_gnb: i == 1,
                cell_radius: 25.0,
            })
            .collect();
        let ns = compute_near_set(&ue_at(0.0, 0.0), &g, NearMetric::Distance, 2).unwrap();
        assert_eq!(ns.members, vec![(GnbId(0), 50.0), (GnbId(1), 100.0)]);
        let clamped = compute_near_set(&ue_at(0.0, 0.0), &g, NearMetric::Distance, 10).unwrap();
        assert_eq!(clamped.members.len(), 3);
    }

    #[test]
    fn near_set_by_gain() {
        let g = place_grid(3, 100.0).unwrap();
        let gains: BTreeMap<_, _> = [(GnbId(0), -120.0), (GnbId(1), -95.0), (GnbId(2), -95.0)].into();
        let ns = compute_near_set(&ue_at(0.0, 0.0), &g, NearMetric::ChannelGain(&gains), 2).unwrap();
        assert_eq!(ns.ids().collect::<Vec<_>>(), vec![GnbId(1), GnbId(2)]);
    }

    #[test]
    fn near_set_errors() {
        assert!(compute_near_set(&ue_at(0.0, 0.0), &[], NearMetric::Distance, 1).is_err());
        let g = place_grid(1, 100.0).unwrap();
        assert!(compute_near_set(&ue_at(0.0, 0.0), &g, NearMetric::Distance, 0).is_err());
    }

    #[test]
    fn activity_from_empty_association() {
        let s = AssociationState::new(4, 3).derive_activity();
        assert!((0..3).all(|b| !s.activity(GnbId(b))));
    }

    #[test]
    fn activity_single_pair() {
        let mut s = AssociationState::new(2, 3);
        s.set_association(UeId(1), GnbId(2), true);
        s.set_clustering(UeId(1), GnbId(2), true);
        let s = s.derive_activity();
        assert_eq!(
            (0..3).map(|b| s.activity(GnbId(b))).collect::<Vec<_>>(),
            vec![false, false, true]
        );
    }

    #[test]
    fn association_without_feasibility_does_not_activate() {
        let mut s = AssociationState::new(1, 2);
        s.set_association(UeId(0), GnbId(0), true);
        let s = s.derive_activity();
        assert!(!s.activity(GnbId(0)));
        assert_eq!(s.validate_constraints(), vec![Violation::Uncovered { ue: UeId(0) }]);
    }

    #[test]
    fn constructed_violations() {
        let mut s = AssociationState::new(2, 2);
        s.set_associations(UeId(0), [GnbId(0)]);
        s.set_feasible(UeId(0), [GnbId(0), GnbId(1)]);
        s.set_associations(UeId(1), [GnbId(1)]);
        s.set_feasible(UeId(1), [GnbId(1)]);
        let ok = s.derive_activity();
        assert!(ok.validate_constraints().is_empty());

        let mut bad = ok.clone();
        bad.set_activity(GnbId(0), false);
        assert_eq!(
            bad.validate_constraints(),
            vec![Violation::ActivityBound { ue: UeId(0), gnb: GnbId(0) }]
        );

        let mut bad = ok;
        bad.set_associations(UeId(1), []);
        assert_eq!(bad.validate_constraints(), vec![Violation::Uncovered { ue: UeId(1) }]);
    }

    #[test]
    fn from_indicators_checks_shape() {
        assert!(AssociationState::from_indicators(vec![true], vec![vec![true]], vec![vec![true]]).is_ok());
        assert!(AssociationState::from_indicators(vec![true], vec![vec![true, false]], vec![vec![true]]).is_err());
        assert!(AssociationState::from_indicators(vec![true], vec![vec![true]], vec![]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn derive_activity_idempotent(bits in proptest::collection::vec(proptest::bool::ANY, 24)) {
            let (ues, gnbs) = (4, 3);
            let mut s = AssociationState::new(ues, gnbs);
            for u in 0..ues {
                for b in 0..gnbs {
                    s.set_association(UeId(u as u32), GnbId(b as u32), bits[u * gnbs + b]);
                    s.set_clustering(UeId(u as u32), GnbId(b as u32), bits[12 + u * gnbs + b]);
                }
            }
            let once = s.derive_activity();
            proptest::prop_assert_eq!(once.derive_activity(), once.clone());
            let bound_ok = !once.validate_constraints().iter().any(|v| matches!(v, Violation::ActivityBound { .. }));
            proptest::prop_assert!(bound_ok);
        }
    }
}
