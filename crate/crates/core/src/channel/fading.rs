use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::SubpathSet;
use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Clarke's rule of thumb: coherence time ~ 0.423 / f_D.
pub const COHERENCE_FACTOR: f64 = 0.423;

/// First-order autoregressive model for the subpath gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProcess {
    correlation: f64,
    doppler_hz: f64,
}

impl FadingProcess {
    /// Derives the per-slot correlation from the maximum Doppler shift
    /// `f_D = v f_c / c`: `rho = exp(-slot / (0.423 / f_D))`.
    pub fn from_motion(speed_mps: f64, carrier_hz: f64, slot_duration_s: f64) -> Result<Self> {
        if !(speed_mps >= 0.0 && speed_mps.is_finite()) {
            return Err(Error::InvalidInput(format!("speed must be >= 0, got {speed_mps}")));
        }
        if !(carrier_hz > 0.0 && slot_duration_s > 0.0) {
            return Err(Error::InvalidInput("carrier and slot duration must be > 0".into()));
        }
        let doppler_hz = speed_mps * carrier_hz / SPEED_OF_LIGHT;
        let correlation = if doppler_hz == 0.0 {
            1.0
        } else {
            let coherence_time = COHERENCE_FACTOR / doppler_hz;
            (-slot_duration_s / coherence_time).exp()
        };
        Ok(Self {
            correlation,
            doppler_hz,
        })
    }

    /// A process with a fixed per-slot correlation and no Doppler bookkeeping.
    pub fn with_correlation(correlation: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&correlation) {
            return Err(Error::InvalidInput(format!(
                "correlation must lie in [0, 1], got {correlation}"
            )));
        }
        Ok(Self {
            correlation,
            doppler_hz: 0.0,
        })
    }

    pub fn correlation(&self) -> f64 {
        self.correlation
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    /// `g' = rho g + sqrt(1 - rho^2) w`, `w ~ CN(0, 1)`.
    ///
    /// The innovation is drawn even when `rho == 1` so the random stream
    /// advances identically at every speed.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, gain: Complex64, rng: &mut R) -> Complex64 {
        let w = complex_gaussian(rng);
        let innovation = (1.0 - self.correlation * self.correlation).max(0.0).sqrt();
        gain * self.correlation + w * innovation
    }
}

/// Circularly-symmetric unit-power complex Gaussian sample.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Advances every subpath gain by one slot; angles are left untouched.
pub fn evolve_fading<R: Rng + ?Sized>(
    subpaths: &SubpathSet,
    process: &FadingProcess,
    rng: &mut R,
) -> SubpathSet {
    let mut next = subpaths.clone();
    evolve_fading_in_place(&mut next, process, rng);
    next
}

pub fn evolve_fading_in_place<R: Rng + ?Sized>(
    subpaths: &mut SubpathSet,
    process: &FadingProcess,
    rng: &mut R,
) {
    for p in &mut subpaths.subpaths {
        p.gain = process.step(p.gain, rng);
    }
    subpaths.slot += 1;
}
