use num_complex::Complex64;

use super::array::{array_response, AntennaArrayConfig, ArraySide, BeamCodebook};
use super::budget::lin_to_db;
use super::matrix::{ChannelMatrix, SubpathSet};
use crate::error::{Error, Result};

/// Result of a codebook search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamChoice {
    pub gain_db: f64,
    pub tx_beam: usize,
    pub rx_beam: usize,
}

/// Exhaustive search for `max |w_rx^H H w_tx|^2` over all beam pairs.
///
/// Ties resolve to the lowest `(tx, rx)` index pair.
pub fn beamforming_gain(h: &ChannelMatrix, codebook: &BeamCodebook) -> Result<BeamChoice> {
    if codebook.n_rx() != h.rows() || codebook.n_tx() != h.cols() {
        return Err(Error::config(
            "codebook",
            format!(
                "codebook is {}x{} but channel is {}x{}",
                codebook.n_rx(),
                codebook.n_tx(),
                h.rows(),
                h.cols()
            ),
        ));
    }
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (t, w_tx) in codebook.tx_beams().iter().enumerate() {
        for (r, w_rx) in codebook.rx_beams().iter().enumerate() {
            let p = h.bilinear(w_rx, w_tx).norm_sqr();
            if p > best.0 {
                best = (p, t, r);
            }
        }
    }
    Ok(BeamChoice {
        gain_db: lin_to_db(best.0.max(0.0)),
        tx_beam: best.1,
        rx_beam: best.2,
    })
}


/// Codebook projections of a link's (fixed) subpath geometry.
///
/// `w_rx^H H w_tx` factors as `(1/sqrt(L)) sum_l g_l c_l` with
/// `c_l = (w_rx^H u_rx,l)(u_tx,l^H w_tx)`, so with angles frozen for the run
/// only the gains change per slot. Expanding the squared magnitude,
///
/// `|sum_l g_l c_l|^2 = sum_l |g_l|^2 |c_l|^2 + sum_{l<m} Re(g_l conj(g_m) * 2 c_l conj(c_m))`,
///
/// turns the beam scan into a weighted sum of `L^2` real planes, each holding
/// one value per beam pair.
#[derive(Debug, Clone)]
pub struct LinkBeamGeometry {
    paths: usize,
    n_rx_beams: usize,
    pairs: usize,
    /// Plane-major: `[j * pairs + t * n_rx + r]`. Planes `0..L` are `|c_l|^2`,
    /// then for each `l < m` the real and imaginary parts of `2 c_l conj(c_m)`.
    planes: Vec<f64>,
    long_term: BeamChoice,
}

const SCAN_CHUNK: usize = 64;

impl LinkBeamGeometry {
    pub fn new(subpaths: &SubpathSet, config: &AntennaArrayConfig, codebook: &BeamCodebook) -> Result<Self> {
        if subpaths.is_empty() {
            return Err(Error::Internal("empty subpath set".into()));
        }
        if codebook.n_rx() != config.n_rx || codebook.n_tx() != config.n_tx {
            return Err(Error::config("codebook", "codebook dimensions do not match the arrays"));
        }
        let paths = subpaths.len();
        let n_rx_beams = codebook.rx_beams().len();
        let pairs = codebook.tx_beams().len() * n_rx_beams;
        let mut coeff = vec![Complex64::new(0.0, 0.0); paths * pairs];
        for (l, p) in subpaths.subpaths.iter().enumerate() {
            let u_tx = array_response(config, p.aod_azimuth, p.aod_elevation, ArraySide::Tx)?;
            let u_rx = array_response(config, p.aoa_azimuth, p.aoa_elevation, ArraySide::Rx)?;
            let rx: Vec<Complex64> = codebook
                .rx_beams()
                .iter()
                .map(|w| w.iter().zip(&u_rx).map(|(w, u)| w.conj() * u).sum())
                .collect();
            for (t, w) in codebook.tx_beams().iter().enumerate() {
                let tx: Complex64 = u_tx.iter().zip(w).map(|(u, w)| u.conj() * w).sum();
                for (r, rx) in rx.iter().enumerate() {
                    coeff[l * pairs + t * n_rx_beams + r] = rx * tx;
                }
            }
        }
        let c = |l: usize| &coeff[l * pairs..(l + 1) * pairs];
        let mut planes = Vec::with_capacity(paths * paths * pairs);
        for l in 0..paths {
            planes.extend(c(l).iter().map(|v| v.norm_sqr()));
        }
        for l in 0..paths {
            for m in l + 1..paths {
                let cross: Vec<Complex64> = c(l).iter().zip(c(m)).map(|(a, b)| 2.0 * a * b.conj()).collect();
                planes.extend(cross.iter().map(|v| v.re));
                planes.extend(cross.iter().map(|v| v.im));
            }
        }
        let mut geometry = Self {
            paths,
            n_rx_beams,
            pairs,
            planes,
            long_term: BeamChoice {
                gain_db: f64::NEG_INFINITY,
                tx_beam: 0,
                rx_beam: 0,
            },
        };
        let unit = vec![1.0; paths];
        let mut weights = unit;
        weights.resize(paths * paths, 0.0);
        let (power, pair) = geometry.scan(&weights);
        geometry.long_term = geometry.choice(power, pair);
        Ok(geometry)
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    /// Best pair for the fading-averaged channel: with unit-power,
    /// uncorrelated gains, `E|w_rx^H H w_tx|^2 = (1/L) sum_l |c_l|^2`.
    pub fn long_term(&self) -> BeamChoice {
        self.long_term
    }

    fn choice(&self, power: f64, pair: usize) -> BeamChoice {
        BeamChoice {
            gain_db: lin_to_db((power / self.paths as f64).max(0.0)),
            tx_beam: pair / self.n_rx_beams,
            rx_beam: pair % self.n_rx_beams,
        }
    }

    /// Instantaneous exhaustive search for the given subpath gains.
    pub fn best_pair(&self, gains: &[Complex64]) -> BeamChoice {
        assert_eq!(gains.len(), self.paths, "gain count must match subpath count");
        let mut inline = [0.0f64; 16];
        let mut heap = Vec::new();
        let weights: &mut [f64] = if self.paths <= 4 {
            &mut inline[..self.paths * self.paths]
        } else {
            heap.resize(self.paths * self.paths, 0.0);
            &mut heap
        };
        let mut j = 0;
        for g in gains {
            weights[j] = g.norm_sqr();
            j += 1;
        }
        for l in 0..self.paths {
            for m in l + 1..self.paths {
                let z = gains[l] * gains[m].conj();
                weights[j] = z.re;
                weights[j + 1] = -z.im;
                j += 2;
            }
        }
        let (power, pair) = self.scan(weights);
        self.choice(power, pair)
    }

    /// `(max sum_j weights[j] * plane_j, pair)`; ties keep the lowest pair
    /// index, i.e. the lowest `(tx, rx)`.
    fn scan(&self, weights: &[f64]) -> (f64, usize) {
        match weights.len() {
            1 => self.scan_fixed::<1>(weights),
            4 => self.scan_fixed::<4>(weights),
            9 => self.scan_fixed::<9>(weights),
            _ => self.scan_any(weights),
        }
    }

    fn scan_fixed<const P: usize>(&self, weights: &[f64]) -> (f64, usize) {
        let w: [f64; P] = weights.try_into().expect("one weight per plane");
        let mut best = (f64::NEG_INFINITY, 0);
        let mut start = 0;
        while start < self.pairs {
            let n = SCAN_CHUNK.min(self.pairs - start);
            let plane = |j: usize| &self.planes[j * self.pairs + start..][..n];
            let mut power = [0.0f64; SCAN_CHUNK];
            let power = &mut power[..n];
            if P == 4 {
                let (p0, p1, p2, p3) = (plane(0), plane(1), plane(2), plane(3));
                for k in 0..n {
                    power[k] = w[0] * p0[k] + w[1] * p1[k] + w[2] * p2[k] + w[3] * p3[k];
                }
            } else {
                for (j, &wj) in w.iter().enumerate() {
                    for (out, &v) in power.iter_mut().zip(plane(j)) {
                        *out += wj * v;
                    }
                }
            }
            let m = power.iter().fold(f64::NEG_INFINITY, |m, &v| if v > m { v } else { m });
            if m > best.0 {
                let k = power.iter().position(|&v| v == m).unwrap_or(0);
                best = (m, start + k);
            }
            start += n;
        }
        best
    }

    fn scan_any(&self, weights: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..self.pairs {
            let v: f64 = weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * self.planes[j * self.pairs + k])
                .sum();
            if v > best.0 {
                best = (v, k);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::array::dft_beams;
    use crate::channel::matrix::channel_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_identity() {
        let h = ChannelMatrix::from_rows(vec![vec![Complex64::new(1.0, 0.0)]], 0).unwrap();
        let cb = BeamCodebook::new(dft_beams(1), dft_beams(1)).unwrap();
        let b = beamforming_gain(&h, &cb).unwrap();
        assert_eq!(b.gain_db, 0.0);
        assert_eq!((b.tx_beam, b.rx_beam), (0, 0));
    }

    #[test]
    fn all_ones_two_by_two_picks_broadside() {
        let one = Complex64::new(1.0, 0.0);
        let h = ChannelMatrix::from_rows(vec![vec![one, one], vec![one, one]], 0).unwrap();
        let cb = BeamCodebook::new(dft_beams(2), dft_beams(2)).unwrap();
        let b = beamforming_gain(&h, &cb).unwrap();
        assert!((b.gain_db - 10.0 * 4f64.log10()).abs() < 1e-12);
        assert_eq!((b.tx_beam, b.rx_beam), (0, 0));
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let one = Complex64::new(1.0, 0.0);
        let h = ChannelMatrix::from_rows(vec![vec![one, one]], 0).unwrap();
        let cb = BeamCodebook::new(dft_beams(4), dft_beams(1)).unwrap();
        assert!(matches!(beamforming_gain(&h, &cb), Err(Error::Config { .. })));
    }

    #[test]
    fn zero_channel_ties_to_first_pair() {
        let z = Complex64::new(0.0, 0.0);
        let h = ChannelMatrix::from_rows(vec![vec![z; 2]; 2], 0).unwrap();
        let cb = BeamCodebook::new(dft_beams(2), dft_beams(2)).unwrap();
        let b = beamforming_gain(&h, &cb).unwrap();
        assert_eq!(b.gain_db, f64::NEG_INFINITY);
        assert_eq!((b.tx_beam, b.rx_beam), (0, 0));
    }

    #[test]
    fn factored_search_matches_matrix_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = AntennaArrayConfig::default();
        let cb = BeamCodebook::dft(&cfg);
        for paths in 1..=10 {
            let set = SubpathSet::draw(paths, &mut rng).unwrap();
            let geo = LinkBeamGeometry::new(&set, &cfg, &cb).unwrap();
            let h = channel_matrix(&set, &cfg).unwrap();
            let direct = beamforming_gain(&h, &cb).unwrap();
            let gains: Vec<_> = set.subpaths.iter().map(|p| p.gain).collect();
            let fast = geo.best_pair(&gains);
            assert!((direct.gain_db - fast.gain_db).abs() < 1e-9);
            assert_eq!((direct.tx_beam, direct.rx_beam), (fast.tx_beam, fast.rx_beam));
        }
    }

    #[test]
    fn long_term_gain_is_mean_over_fading() {
        // Average the selected pair's instantaneous power over many fading draws.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = AntennaArrayConfig::new(4, 2).unwrap();
        let cb = BeamCodebook::dft(&cfg);
        let set = SubpathSet::draw(2, &mut rng).unwrap();
        let geo = LinkBeamGeometry::new(&set, &cfg, &cb).unwrap();
        let lt = geo.long_term();
        let mut acc = 0.0;
        let n = 40_000;
        for _ in 0..n {
            let mut s = set.clone();
            for p in &mut s.subpaths {
                p.gain = crate::channel::fading::complex_gaussian(&mut rng);
            }
            let h = channel_matrix(&s, &cfg).unwrap();
            acc += h
                .bilinear(&cb.rx_beams()[lt.rx_beam], &cb.tx_beams()[lt.tx_beam])
                .norm_sqr();
        }
        let mean_db = lin_to_db(acc / n as f64);
        assert!((mean_db - lt.gain_db).abs() < 0.1, "{mean_db} vs {}", lt.gain_db);
    }
}
