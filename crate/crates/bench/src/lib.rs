//! Shared fixtures for the criterion benchmarks.

use mmwave::{AntennaArrayConfig, BeamCodebook, SubpathSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic link with `paths` subpaths on the default arrays.
pub fn fixture(paths: usize, seed: u64) -> (SubpathSet, AntennaArrayConfig, BeamCodebook) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = SubpathSet::draw(paths, &mut rng).expect("non-empty subpath set");
    let cfg = AntennaArrayConfig::default();
    let cb = BeamCodebook::dft(&cfg);
    (set, cfg, cb)
}
