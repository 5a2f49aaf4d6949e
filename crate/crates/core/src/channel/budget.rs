use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::GnbId;

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    (db * (std::f64::consts::LN_10 / 10.0)).exp()
}

/// `10 log10(x)`; zero maps to negative infinity.
#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// One link's budget, all terms in dB / dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub combined_antenna_gain_db: f64,
    pub subpath_attenuation_db: f64,
    pub pathloss_db: f64,
    pub rx_power_dbm: f64,
}

/// `P_rx = P_t * psi / (delta * PL)`, evaluated in dB.
pub fn received_power(tx_power_dbm: f64, psi_db: f64, delta_db: f64, pathloss_db: f64) -> LinkBudget {
    LinkBudget {
        tx_power_dbm,
        combined_antenna_gain_db: psi_db,
        subpath_attenuation_db: delta_db,
        pathloss_db,
        rx_power_dbm: tx_power_dbm + psi_db - delta_db - pathloss_db,
    }
}

/// Thermal noise over `bandwidth_hz` for a flat density in dBm/Hz.
pub fn noise_power(bandwidth_hz: f64, noise_density_dbm_per_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::InvalidInput(format!("bandwidth must be > 0, got {bandwidth_hz}")));
    }
    Ok(noise_density_dbm_per_hz + lin_to_db(bandwidth_hz))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrReport {
    pub sinr_db: f64,
    pub interference_dbm: f64,
    pub noise_dbm: f64,
    pub satisfied: bool,
}

/// SINR with powers summed in the linear domain. Interference of
/// `-inf` dBm means none.
pub fn sinr(rx_power_dbm: f64, interference_dbm: f64, noise_dbm: f64, min_sinr_db: f64) -> SinrReport {
    let denom = db_to_lin(interference_dbm) + db_to_lin(noise_dbm);
    let sinr_db = rx_power_dbm - lin_to_db(denom);
    SinrReport {
        sinr_db,
        interference_dbm,
        noise_dbm,
        satisfied: sinr_db >= min_sinr_db,
    }
}

/// Aggregate interference at a UE in dBm.
///
/// Each candidate carries the budget its link would have with an aligned
/// beam; active gNBs outside the serving set contribute that power less
/// `sidelobe_penalty_db`. No contributors gives `-inf`.
pub fn interference_at<I, A, S>(aligned_budgets_dbm: I, is_active: A, is_serving: S, sidelobe_penalty_db: f64) -> f64
where
    I: IntoIterator<Item = (GnbId, f64)>,
    A: Fn(GnbId) -> bool,
    S: Fn(GnbId) -> bool,
{
    let total: f64 = aligned_budgets_dbm
        .into_iter()
        .filter(|&(b, _)| is_active(b) && !is_serving(b))
        .map(|(_, p)| db_to_lin(p - sidelobe_penalty_db))
        .sum();
    lin_to_db(total)
}
