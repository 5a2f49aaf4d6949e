use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform linear arrays at both ends of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaArrayConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
}

impl Default for AntennaArrayConfig {
    fn default() -> Self {
        Self {
            n_tx: 16,
            n_rx: 4,
            element_spacing: 0.5,
        }
    }
}

impl AntennaArrayConfig {
    pub fn new(n_tx: usize, n_rx: usize) -> Result<Self> {
        let cfg = Self {
            n_tx,
            n_rx,
            element_spacing: 0.5,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx < 1 {
            return Err(Error::config("n_tx", "need at least one transmit element"));
        }
        if self.n_rx < 1 {
            return Err(Error::config("n_rx", "need at least one receive element"));
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return Err(Error::config("element_spacing", "must be > 0"));
        }
        Ok(())
    }

    pub fn elements(&self, side: ArraySide) -> usize {
        match side {
            ArraySide::Tx => self.n_tx,
            ArraySide::Rx => self.n_rx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArraySide {
    Tx,
    Rx,
}

/// Steering vector of the linear array toward `azimuth`.
///
/// Entry `k` is `exp(j 2 pi s k sin(azimuth))` with `s` the spacing in
/// wavelengths, so at half-wavelength spacing the phase step is
/// `pi sin(azimuth)`. The vector is not normalized. Elevation does not
/// enter a linear array's response; it is accepted so callers can pass
/// full subpath geometry.
pub fn array_response(
    config: &AntennaArrayConfig,
    azimuth: f64,
    _elevation: f64,
    side: ArraySide,
) -> Result<Vec<Complex64>> {
    let n = config.elements(side);
    if n < 1 {
        return Err(Error::InvalidInput("array needs at least one element".into()));
    }
    if !azimuth.is_finite() {
        return Err(Error::InvalidInput(format!("azimuth must be finite, got {azimuth}")));
    }
    let step = 2.0 * PI * config.element_spacing * azimuth.sin();
    Ok((0..n).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect())
}

/// Transmit and receive beam sets for exhaustive beam search.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook {
    tx_beams: Vec<Vec<Complex64>>,
    rx_beams: Vec<Vec<Complex64>>,
}

impl BeamCodebook {
    /// Builds a codebook, rejecting empty sides, ragged beams and beams that
    /// are not unit-norm.
    pub fn new(tx_beams: Vec<Vec<Complex64>>, rx_beams: Vec<Vec<Complex64>>) -> Result<Self> {
        for (name, beams) in [("tx_beams", &tx_beams), ("rx_beams", &rx_beams)] {
            let Some(first) = beams.first() else {
                return Err(Error::config(name, "codebook is empty"));
            };
            let len = first.len();
            for (i, w) in beams.iter().enumerate() {
                if w.len() != len || len == 0 {
                    return Err(Error::config(name, format!("beam {i} has length {}", w.len())));
                }
                let norm: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::config(name, format!("beam {i} has norm {norm}")));
                }
            }
        }
        Ok(Self { tx_beams, rx_beams })
    }

    /// The n-point DFT codebook on each side.
    pub fn dft(config: &AntennaArrayConfig) -> Self {
        Self {
            tx_beams: dft_beams(config.n_tx),
            rx_beams: dft_beams(config.n_rx),
        }
    }

    pub fn tx_beams(&self) -> &[Vec<Complex64>] {
        &self.tx_beams
    }

    pub fn rx_beams(&self) -> &[Vec<Complex64>] {
        &self.rx_beams
    }

    pub fn n_tx(&self) -> usize {
        self.tx_beams[0].len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx_beams[0].len()
    }
}

/// `w_k[m] = exp(j 2 pi m k / n) / sqrt(n)` for `k, m` in `0..n`.
pub fn dft_beams(n: usize) -> Vec<Vec<Complex64>> {
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|m| {
                    let phase = 2.0 * PI * ((m * k) % n) as f64 / n as f64;
                    Complex64::from_polar(scale, phase)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn single_element() {
        let cfg = AntennaArrayConfig::new(1, 1).unwrap();
        let v = array_response(&cfg, 1.234, 0.2, ArraySide::Tx).unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn broadside_has_no_phase_progression() {
        let cfg = AntennaArrayConfig::new(2, 2).unwrap();
        let v = array_response(&cfg, 0.0, 0.0, ArraySide::Rx).unwrap();
        assert!(v.iter().all(|c| close(*c, Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn endfire_alternates_sign() {
        let cfg = AntennaArrayConfig::new(4, 1).unwrap();
        let v = array_response(&cfg, PI / 2.0, 0.0, ArraySide::Tx).unwrap();
        let expected = [1.0, -1.0, 1.0, -1.0];
        for (c, e) in v.iter().zip(expected) {
            assert!(close(*c, Complex64::new(e, 0.0)), "{c} vs {e}");
        }
    }

    #[test]
    fn zero_elements_rejected() {
        let cfg = AntennaArrayConfig {
            n_tx: 0,
            n_rx: 1,
            element_spacing: 0.5,
        };
        assert!(cfg.validate().is_err());
        assert!(array_response(&cfg, 0.0, 0.0, ArraySide::Tx).is_err());
        assert!(AntennaArrayConfig::new(2, 0).is_err());
    }

    #[test]
    fn dft_codebook_is_unit_norm_and_orthogonal() {
        for n in [1, 2, 4, 16] {
            let beams = dft_beams(n);
            assert_eq!(beams.len(), n);
            for (i, a) in beams.iter().enumerate() {
                for (j, b) in beams.iter().enumerate() {
                    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.norm() - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn codebook_validation() {
        assert!(BeamCodebook::new(vec![], dft_beams(2)).is_err());
        assert!(BeamCodebook::new(dft_beams(2), vec![vec![Complex64::new(2.0, 0.0)]]).is_err());
        assert!(BeamCodebook::new(dft_beams(2), dft_beams(4)).is_ok());
    }
}
