use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::array::{array_response, AntennaArrayConfig, ArraySide};
use super::fading::complex_gaussian;
use crate::error::{Error, Result};

/// Elevation angles are drawn from `[-ELEVATION_SPREAD, ELEVATION_SPREAD]`.
pub const ELEVATION_SPREAD: f64 = PI / 6.0;

/// One propagation subpath of a gNB -> UE link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subpath {
    pub gain: Complex64,
    pub aoa_azimuth: f64,
    pub aoa_elevation: f64,
    pub aod_azimuth: f64,
    pub aod_elevation: f64,
}

/// The subpaths of a single link at a given slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SubpathSet {
    pub subpaths: Vec<Subpath>,
    pub slot: u64,
}

impl SubpathSet {
    pub fn new(subpaths: Vec<Subpath>) -> Result<Self> {
        if subpaths.is_empty() {
            return Err(Error::InvalidInput("a link needs at least one subpath".into()));
        }
        Ok(Self { subpaths, slot: 0 })
    }

    /// Draws `count` subpaths with uniform azimuths in `[-pi, pi]`, uniform
    /// elevations in `[-pi/6, pi/6]` and CN(0, 1) gains.
    pub fn draw<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<Self> {
        let subpaths = (0..count)
            .map(|_| {
                let aoa_azimuth = rng.random_range(-PI..=PI);
                let aoa_elevation = rng.random_range(-ELEVATION_SPREAD..=ELEVATION_SPREAD);
                let aod_azimuth = rng.random_range(-PI..=PI);
                let aod_elevation = rng.random_range(-ELEVATION_SPREAD..=ELEVATION_SPREAD);
                Subpath {
                    gain: complex_gaussian(rng),
                    aoa_azimuth,
                    aoa_elevation,
                    aod_azimuth,
                    aod_elevation,
                }
            })
            .collect();
        Self::new(subpaths)
    }

    pub fn len(&self) -> usize {
        self.subpaths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subpaths.is_empty()
    }
}

/// Dense `n_rx x n_tx` complex channel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
    pub slot: u64,
}

impl ChannelMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>, slot: u64) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Internal("channel matrix rows must be non-empty and equal length".into()));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
            slot,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e * factor).collect(),
            ..self.clone()
        }
    }

    /// `w_rx^H H w_tx`.
    pub fn bilinear(&self, w_rx: &[Complex64], w_tx: &[Complex64]) -> Complex64 {
        debug_assert_eq!(w_rx.len(), self.rows);
        debug_assert_eq!(w_tx.len(), self.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, wr) in w_rx.iter().enumerate() {
            let row = &self.entries[r * self.cols..(r + 1) * self.cols];
            let hw: Complex64 = row.iter().zip(w_tx).map(|(h, w)| h * w).sum();
            acc += wr.conj() * hw;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Per-link channel `H = (1/sqrt(L)) sum_l g_l u_rx(l) u_tx(l)^H`.
pub fn channel_matrix(subpaths: &SubpathSet, config: &AntennaArrayConfig) -> Result<ChannelMatrix> {
    config.validate()?;
    if subpaths.is_empty() {
        return Err(Error::Internal("empty subpath set".into()));
    }
    let (n_rx, n_tx) = (config.n_rx, config.n_tx);
    let norm = 1.0 / (subpaths.len() as f64).sqrt();
    let mut entries = vec![Complex64::new(0.0, 0.0); n_rx * n_tx];
    for p in &subpaths.subpaths {
        let u_rx = array_response(config, p.aoa_azimuth, p.aoa_elevation, ArraySide::Rx)?;
        let u_tx = array_response(config, p.aod_azimuth, p.aod_elevation, ArraySide::Tx)?;
        if u_rx.len() != n_rx || u_tx.len() != n_tx {
            return Err(Error::Internal("array response length mismatch".into()));
        }
        let g = p.gain * norm;
        for (r, ur) in u_rx.iter().enumerate() {
            let gu = g * ur;
            for (t, ut) in u_tx.iter().enumerate() {
                entries[r * n_tx + t] += gu * ut.conj();
            }
        }
    }
    Ok(ChannelMatrix {
        rows: n_rx,
        cols: n_tx,
        entries,
        slot: subpaths.slot,
    })
}
