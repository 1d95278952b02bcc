//! Binaural target-speaker extraction toolkit.
//!
//! The pipeline: monaural speech is spatialized through head-related impulse
//! responses into binaural cocktail-party mixtures; a time-domain
//! filter-and-sum extraction network — conditioned on a target-speaker
//! embedding through a selective-attention block — estimates per-frame
//! beamforming filters for both ears; filtered frames are averaged and
//! overlap-added back into the extracted waveform. Training and evaluation
//! use the scale-invariant SDR.

pub mod audio;
pub mod error;
pub mod frontend;
pub mod nn;
pub mod objectives;
pub mod reconstruct;

pub use audio::{AudioClip, SAMPLE_RATE};
pub use error::{Error, Result};
