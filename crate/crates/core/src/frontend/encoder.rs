//! Learned spectral encoder: a bias-free linear map from each N-sample
//! frame to a D-dimensional feature (a 1-D convolution whose kernel spans
//! the frame).

use candle_core::Tensor;
use candle_nn::{Module, VarBuilder};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SpectralEncoder {
    lin: candle_nn::Linear,
    frame_len: usize,
    feat_dim: usize,
}

impl SpectralEncoder {
    pub fn new(frame_len: usize, feat_dim: usize, vb: VarBuilder) -> Result<Self> {
        Ok(Self {
            lin: candle_nn::linear_no_bias(frame_len, feat_dim, vb)?,
            frame_len,
            feat_dim,
        })
    }

    pub fn feat_dim(&self) -> usize {
        self.feat_dim
    }

    /// Encodes `[.., m, N]` frames into `[.., m, D]` features.
    pub fn encode(&self, frames: &Tensor) -> Result<Tensor> {
        let last = *frames
            .dims()
            .last()
            .ok_or_else(|| Error::Contract("encoder input has no dimensions".into()))?;
        if last != self.frame_len {
            return Err(Error::Contract(format!(
                "encoder expects frame length {}, got {last}",
                self.frame_len
            )));
        }
        Ok(self.lin.forward(frames)?)
    }
}
