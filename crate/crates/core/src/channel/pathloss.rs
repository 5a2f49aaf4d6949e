use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{GnbId, UeId};

/// Distances below this are clamped before taking the logarithm.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Log-distance path-loss model with a log-normal shadowing term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Floating intercept in dB.
    pub floating_intercept_db: f64,
    /// Path-loss exponent (dimensionless).
    pub pathloss_exponent: f64,
    /// Standard deviation of the shadowing term, dB.
    pub shadow_sigma_db: f64,
}

impl PathLossParams {
    /// 28 GHz NLoS fit with 8.2 dB shadowing.
    pub const NLOS_28GHZ: PathLossParams = PathLossParams {
        floating_intercept_db: 72.0,
        pathloss_exponent: 2.92,
        shadow_sigma_db: 8.2,
    };

    pub fn validate(&self) -> Result<()> {
        if !self.floating_intercept_db.is_finite() {
            return Err(Error::config("floating_intercept_db", "must be finite"));
        }
        if !(self.pathloss_exponent > 0.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::config("pathloss_exponent", "must be > 0"));
        }
        if !(self.shadow_sigma_db >= 0.0 && self.shadow_sigma_db.is_finite()) {
            return Err(Error::config("shadow_sigma_db", "must be >= 0"));
        }
        Ok(())
    }
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self::NLOS_28GHZ
    }
}

/// Path loss in dB at `distance_m` with a given shadowing realization.
///
/// `PL = intercept + exponent * 10 log10(d) + shadow`, with `d` clamped to
/// at least one meter.
pub fn path_loss(params: &PathLossParams, distance_m: f64, shadow_db: f64) -> Result<f64> {
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(Error::InvalidInput(format!(
            "distance must be finite and non-negative, got {distance_m}"
        )));
    }
    if !shadow_db.is_finite() {
        return Err(Error::InvalidInput(format!(
            "shadowing term must be finite, got {shadow_db}"
        )));
    }
    let d = distance_m.max(MIN_DISTANCE_M);
    Ok(params.floating_intercept_db + params.pathloss_exponent * 10.0 * d.log10() + shadow_db)
}

/// Per-link shadowing values, drawn once and then frozen for the run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShadowField {
    values: BTreeMap<(GnbId, UeId), f64>,
}

impl ShadowField {
    /// Draws one N(0, sigma^2) value per (gNB, UE) pair, in (gNB, UE) order.
    pub fn draw<R: Rng + ?Sized>(gnbs: &[GnbId], ues: &[UeId], sigma_db: f64, rng: &mut R) -> Self {
        let mut values = BTreeMap::new();
        if sigma_db == 0.0 {
            for &b in gnbs {
                for &u in ues {
                    values.insert((b, u), 0.0);
                }
            }
            return Self { values };
        }
        let normal = Normal::new(0.0, sigma_db).expect("sigma validated as finite and positive");
        for &b in gnbs {
            for &u in ues {
                values.insert((b, u), normal.sample(rng));
            }
        }
        Self { values }
    }

    pub fn from_values(values: impl IntoIterator<Item = ((GnbId, UeId), f64)>) -> Self {
        Self {
            values: values.into_iter().collect(),
        }
    }

    /// Shadowing for the link, or 0 dB if the pair was never drawn.
    pub fn get(&self, gnb: GnbId, ue: UeId) -> f64 {
        self.values.get(&(gnb, ue)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
