//! Waveform-to-feature conversion: framing, spectral encoding, and the two
//! binaural interaction features (CSim and IAC).

pub mod assemble;
pub mod csim;
pub mod encoder;
pub mod geometry;
pub mod iac;

pub use assemble::Bottleneck;
pub use csim::{binaural_csim_features, csim, monaural_csim_feature};
pub use encoder::SpectralEncoder;
pub use geometry::{frame_signal, hann_window, EarFrames, FrameBatch, FrameGeometry};
pub use iac::{iac_attention, IacProjection};
