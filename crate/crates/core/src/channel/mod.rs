//! Large-scale attenuation, multipath channel synthesis, codebook
//! beamforming and the SINR service check for individual gNB -> UE links.

mod array;
mod beam;
mod budget;
mod fading;
mod matrix;
mod pathloss;

pub use array::{array_response, dft_beams, AntennaArrayConfig, ArraySide, BeamCodebook};
pub use beam::{beamforming_gain, BeamChoice, LinkBeamGeometry};
pub use budget::{db_to_lin, interference_at, lin_to_db, noise_power, received_power, sinr, LinkBudget, SinrReport};
pub use fading::{
    complex_gaussian, evolve_fading, evolve_fading_in_place, FadingProcess, COHERENCE_FACTOR, SPEED_OF_LIGHT,
};
pub use matrix::{channel_matrix, ChannelMatrix, Subpath, SubpathSet, ELEVATION_SPREAD};
pub use pathloss::{path_loss, PathLossParams, ShadowField, MIN_DISTANCE_M};
