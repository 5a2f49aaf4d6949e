use serde::{Deserialize, Serialize};

use crate::channel::{noise_power, AntennaArrayConfig, PathLossParams};
use crate::controller::{ClusterThresholds, HandoverPolicy};
use crate::error::{Error, Result};
use crate::mobility::{default_edge_trajectory, Trajectory};
use crate::topology::{place_grid, AssociationState, Gnb, Point};

/// Downlink transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// One serving gNB, hard handovers with an interruption.
    Single,
    /// Redundant copies from every serving-cluster member, selection combining.
    Multi,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Single, Scheme::Multi];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Single => "single",
            Scheme::Multi => "multi",
        }
    }

    /// Stable index used in seed derivation.
    pub fn index(self) -> u64 {
        match self {
            Scheme::Single => 0,
            Scheme::Multi => 1,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Scheme::Single),
            "multi" => Ok(Scheme::Multi),
            other => Err(Error::config("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeSelection {
    Single,
    Multi,
    #[default]
    Both,
}

impl SchemeSelection {
    pub fn schemes(self) -> &'static [Scheme] {
        match self {
            SchemeSelection::Single => &[Scheme::Single],
            SchemeSelection::Multi => &[Scheme::Multi],
            SchemeSelection::Both => &Scheme::ALL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NearMetricKind {
    #[default]
    Distance,
    ChannelGain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryKeyword {
    AutoEdge,
}

/// Either `"auto-edge"` or `{"waypoints": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrajectorySpec {
    Keyword(TrajectoryKeyword),
    Waypoints { waypoints: Vec<[f64; 2]> },
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec::Keyword(TrajectoryKeyword::AutoEdge)
    }
}

/// Association indicators supplied up front, checked by `validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreseededAssociation {
    pub activity: Vec<bool>,
    /// `association[ue][gnb]`
    pub association: Vec<Vec<bool>>,
    /// `clustering[ue][gnb]`
    pub clustering: Vec<Vec<bool>>,
}

/// Complete simulation input. Every field has a default; the radio
/// defaults are the evaluation parameters of the reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub carrier_ghz: f64,
    pub bandwidth_ghz: f64,
    pub tx_power_dbm: f64,
    pub shadow_sigma_db: f64,
    pub noise_dbm_hz: f64,
    pub min_sinr_db: f64,
    pub users_per_cell: u32,

    pub floating_intercept_db: f64,
    pub pathloss_exponent: f64,
    pub subpath_attenuation_db: f64,
    pub subpaths: usize,
    pub n_tx: usize,
    pub n_rx: usize,
    pub element_spacing: f64,
    pub sidelobe_penalty_db: f64,

    pub gnb_count: usize,
    pub cell_radius_m: f64,
    pub trajectory: TrajectorySpec,
    pub edge_offset_factor: f64,

    pub near_set_size: usize,
    pub near_metric: NearMetricKind,

    pub reporting_period_slots: u64,
    pub enter_threshold_db: f64,
    pub exit_threshold_db: f64,
    pub max_cluster_size: Option<usize>,
    pub handover_hysteresis_db: f64,
    pub handover_interruption_slots: u64,
    pub time_to_trigger_slots: u64,

    /// Per-slot probability that a non-serving gNB is busy with its own users.
    pub background_activity: f64,

    /// km/h
    pub speed_sweep: Vec<f64>,
    pub scheme: SchemeSelection,
    pub slot_duration_s: f64,
    /// `None`: the time to traverse the whole trajectory.
    pub total_slots: Option<u64>,
    pub seeds: u64,
    pub seed: u64,

    pub association: Option<PreseededAssociation>,
}

impl Default for Scenario {
    fn default() -> Self {
        let pl = PathLossParams::NLOS_28GHZ;
        let arrays = AntennaArrayConfig::default();
        let ho = HandoverPolicy::default();
        Self {
            carrier_ghz: 28.0,
            bandwidth_ghz: 1.0,
            tx_power_dbm: 37.0,
            shadow_sigma_db: pl.shadow_sigma_db,
            noise_dbm_hz: -174.0,
            min_sinr_db: -10.0,
            users_per_cell: 100,

            floating_intercept_db: pl.floating_intercept_db,
            pathloss_exponent: pl.pathloss_exponent,
            subpath_attenuation_db: 0.0,
            subpaths: 2,
            n_tx: arrays.n_tx,
            n_rx: arrays.n_rx,
            element_spacing: arrays.element_spacing,
            sidelobe_penalty_db: 20.0,

            gnb_count: 3,
            cell_radius_m: 100.0,
            trajectory: TrajectorySpec::default(),
            edge_offset_factor: crate::mobility::EDGE_OFFSET_FACTOR,

            near_set_size: 3,
            near_metric: NearMetricKind::Distance,

            reporting_period_slots: 5,
            enter_threshold_db: -5.0,
            exit_threshold_db: -13.0,
            max_cluster_size: None,
            handover_hysteresis_db: ho.hysteresis_db,
            handover_interruption_slots: ho.interruption_slots,
            time_to_trigger_slots: ho.time_to_trigger_slots,

            background_activity: 0.5,

            speed_sweep: vec![30.0, 45.0, 60.0, 75.0, 90.0],
            scheme: SchemeSelection::Both,
            slot_duration_s: 1e-3,
            total_slots: None,
            seeds: 100,
            seed: 0,

            association: None,
        }
    }
}

fn check(issues: &mut Vec<Error>, ok: bool, field: &str, message: &str) {
    if !ok {
        issues.push(Error::config(field, message));
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Every violated constraint, in field order.
    pub fn validate(&self) -> Vec<Error> {
        let mut issues = Vec::new();
        let finite_pos = |x: f64| x > 0.0 && x.is_finite();
        check(&mut issues, finite_pos(self.carrier_ghz), "carrier_ghz", "must be > 0");
        check(&mut issues, finite_pos(self.bandwidth_ghz), "bandwidth_ghz", "must be > 0");
        check(&mut issues, self.tx_power_dbm.is_finite(), "tx_power_dbm", "must be finite");
        check(
            &mut issues,
            self.shadow_sigma_db >= 0.0 && self.shadow_sigma_db.is_finite(),
            "shadow_sigma_db",
            "must be >= 0",
        );
        check(&mut issues, self.noise_dbm_hz.is_finite(), "noise_dbm_hz", "must be finite");
        check(&mut issues, self.min_sinr_db.is_finite(), "min_sinr_db", "must be finite");
        check(&mut issues, self.floating_intercept_db.is_finite(), "floating_intercept_db", "must be finite");
        check(&mut issues, finite_pos(self.pathloss_exponent), "pathloss_exponent", "must be > 0");
        check(&mut issues, self.subpath_attenuation_db.is_finite(), "subpath_attenuation_db", "must be finite");
        check(&mut issues, self.subpaths >= 1, "subpaths", "must be >= 1");
        check(&mut issues, self.n_tx >= 1, "n_tx", "must be >= 1");
        check(&mut issues, self.n_rx >= 1, "n_rx", "must be >= 1");
        check(&mut issues, finite_pos(self.element_spacing), "element_spacing", "must be > 0");
        check(&mut issues, self.sidelobe_penalty_db.is_finite(), "sidelobe_penalty_db", "must be finite");
        check(&mut issues, self.gnb_count >= 1, "gnb_count", "must be >= 1");
        check(&mut issues, finite_pos(self.cell_radius_m), "cell_radius_m", "must be > 0");
        check(&mut issues, self.edge_offset_factor.is_finite(), "edge_offset_factor", "must be finite");
        match &self.trajectory {
            TrajectorySpec::Keyword(TrajectoryKeyword::AutoEdge) => check(
                &mut issues,
                self.gnb_count >= 2,
                "trajectory",
                "auto-edge path needs gnb_count >= 2",
            ),
            TrajectorySpec::Waypoints { waypoints } => {
                let pts: Vec<Point> = waypoints.iter().map(|&[x, y]| Point::new(x, y)).collect();
                if let Err(e) = Trajectory::new(pts, 0.0) {
                    issues.push(e);
                }
            }
        }
        check(&mut issues, self.near_set_size >= 1, "near_set_size", "must be >= 1");
        check(&mut issues, self.reporting_period_slots >= 1, "reporting_period_slots", "must be >= 1");
        if let Err(e) = ClusterThresholds::new(self.enter_threshold_db, self.exit_threshold_db) {
            issues.push(e);
        }
        check(&mut issues, self.max_cluster_size != Some(0), "max_cluster_size", "must be >= 1");
        check(
            &mut issues,
            self.handover_hysteresis_db >= 0.0 && !self.handover_hysteresis_db.is_nan(),
            "handover_hysteresis_db",
            "must be >= 0",
        );
        check(
            &mut issues,
            (0.0..=1.0).contains(&self.background_activity),
            "background_activity",
            "must lie in [0, 1]",
        );
        check(&mut issues, !self.speed_sweep.is_empty(), "speed_sweep", "must list at least one speed");
        check(
            &mut issues,
            self.speed_sweep.iter().all(|v| *v >= 0.0 && v.is_finite()),
            "speed_sweep",
            "speeds must be finite and >= 0",
        );
        if self.total_slots.is_none() {
            check(
                &mut issues,
                self.speed_sweep.iter().all(|v| *v > 0.0),
                "speed_sweep",
                "a zero speed needs an explicit total_slots",
            );
        }
        check(&mut issues, finite_pos(self.slot_duration_s), "slot_duration_s", "must be > 0");
        check(&mut issues, self.total_slots != Some(0), "total_slots", "must be >= 1");
        check(&mut issues, self.seeds >= 1, "seeds", "must be >= 1");
        if let Some(a) = &self.association {
            match AssociationState::from_indicators(a.activity.clone(), a.association.clone(), a.clustering.clone()) {
                Err(e) => issues.push(e),
                Ok(state) => {
                    if state.gnb_count() != self.gnb_count {
                        issues.push(Error::config(
                            "association.activity",
                            format!("has {} gNBs, scenario has {}", state.gnb_count(), self.gnb_count),
                        ));
                    }
                    for v in state.validate_constraints() {
                        issues.push(Error::config("association", v.to_string()));
                    }
                }
            }
        }
        issues
    }

    /// First validation failure, if any.
    pub fn check(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn path_loss_params(&self) -> PathLossParams {
        PathLossParams {
            floating_intercept_db: self.floating_intercept_db,
            pathloss_exponent: self.pathloss_exponent,
            shadow_sigma_db: self.shadow_sigma_db,
        }
    }

    pub fn arrays(&self) -> AntennaArrayConfig {
        AntennaArrayConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            element_spacing: self.element_spacing,
        }
    }

    pub fn thresholds(&self) -> Result<ClusterThresholds> {
        ClusterThresholds::new(self.enter_threshold_db, self.exit_threshold_db)?.with_max_size(self.max_cluster_size)
    }

    pub fn handover_policy(&self) -> HandoverPolicy {
        HandoverPolicy {
            hysteresis_db: self.handover_hysteresis_db,
            interruption_slots: self.handover_interruption_slots,
            time_to_trigger_slots: self.time_to_trigger_slots,
        }
    }

    pub fn noise_dbm(&self) -> Result<f64> {
        noise_power(self.bandwidth_ghz * 1e9, self.noise_dbm_hz)
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_ghz * 1e9
    }

    pub fn gnbs(&self) -> Result<Vec<Gnb>> {
        place_grid(self.gnb_count, self.cell_radius_m)
    }

    pub fn trajectory(&self, speed_mps: f64) -> Result<Trajectory> {
        match &self.trajectory {
            TrajectorySpec::Keyword(TrajectoryKeyword::AutoEdge) => {
                default_edge_trajectory(&self.gnbs()?, self.cell_radius_m, self.edge_offset_factor, speed_mps)
            }
            TrajectorySpec::Waypoints { waypoints } => {
                Trajectory::new(waypoints.iter().map(|&[x, y]| Point::new(x, y)).collect(), speed_mps)
            }
        }
    }

    /// Slots simulated per run at `speed_kmh`.
    pub fn slots_for(&self, speed_kmh: f64) -> Result<u64> {
        if let Some(n) = self.total_slots {
            return Ok(n);
        }
        self.trajectory(kmh_to_mps(speed_kmh))?
            .traversal_slots(self.slot_duration_s)
            .ok_or_else(|| Error::config("total_slots", "a zero speed needs an explicit total_slots"))
    }

    /// Speeds in ascending order without duplicates.
    pub fn sorted_speeds(&self) -> Vec<f64> {
        let mut v = self.speed_sweep.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let s = Scenario::default();
        assert_eq!(s.carrier_ghz, 28.0);
        assert_eq!(s.bandwidth_ghz, 1.0);
        assert_eq!(s.tx_power_dbm, 37.0);
        assert_eq!(s.shadow_sigma_db, 8.2);
        assert_eq!(s.noise_dbm_hz, -174.0);
        assert_eq!(s.min_sinr_db, -10.0);
        assert_eq!(s.users_per_cell, 100);
        assert!(s.validate().is_empty());
        assert!((s.noise_dbm().unwrap() + 84.0).abs() < 1e-9);
    }

    #[test]
    fn partial_file_takes_defaults() {
        let s = Scenario::from_json(r#"{"speed_sweep":[60]}"#).unwrap();
        assert_eq!(s.speed_sweep, vec![60.0]);
        assert_eq!(Scenario { speed_sweep: vec![60.0], ..Scenario::default() }, s);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Scenario::from_json("{\n  \"carrier_ghz\": 28,\n  \"bogus\": 1\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && err.line() == 3, "{msg}");
    }

    #[test]
    fn trajectory_forms() {
        let s = Scenario::from_json(r#"{"trajectory":"auto-edge"}"#).unwrap();
        assert_eq!(s.trajectory, TrajectorySpec::default());
        let s = Scenario::from_json(r#"{"trajectory":{"waypoints":[[0,0],[10,0]]}}"#).unwrap();
        assert_eq!(s.trajectory(1.0).unwrap().length(), 10.0);
        assert!(Scenario::from_json(r#"{"trajectory":"zigzag"}"#).is_err());
    }

    #[test]
    fn collects_every_issue() {
        let s = Scenario {
            enter_threshold_db: -20.0,
            seeds: 0,
            background_activity: 1.5,
            ..Scenario::default()
        };
        let issues = s.validate();
        assert_eq!(issues.len(), 3, "{issues:?}");
        assert!(issues.iter().any(|e| e.to_string().contains("hysteresis")));
    }

    #[test]
    fn preseeded_association_checked() {
        let ok = r#"{"association":{"activity":[true,false,false],"association":[[true,false,false]],"clustering":[[true,true,false]]}}"#;
        assert!(Scenario::from_json(ok).unwrap().validate().is_empty());
        let bad = r#"{"association":{"activity":[false,false,false],"association":[[true,false,false]],"clustering":[[true,true,false]]}}"#;
        let issues = Scenario::from_json(bad).unwrap().validate();
        assert_eq!(issues.len(), 1);
        assert!(issues[0].to_string().contains("activity bound"));
    }

    #[test]
    fn traversal_defaults() {
        let s = Scenario::default();
        assert_eq!(s.slots_for(30.0).unwrap(), 72_000);
        assert_eq!(s.slots_for(90.0).unwrap(), 24_000);
        let fixed = Scenario { total_slots: Some(10), ..s };
        assert_eq!(fixed.slots_for(0.0).unwrap(), 10);
    }

    #[test]
    fn stationary_needs_explicit_length() {
        let s = Scenario { speed_sweep: vec![0.0], ..Scenario::default() };
        assert_eq!(s.validate().len(), 1);
    }
}
