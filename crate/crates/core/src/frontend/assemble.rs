//! Combines spectral and binaural features and projects them to the
//! separator width through a learned linear bottleneck.

use candle_core::{Tensor, D};
use candle_nn::{Module, VarBuilder};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Bottleneck {
    lin: candle_nn::Linear,
    spectral_dim: usize,
    binaural_dim: usize,
}

impl Bottleneck {
    /// `spectral_dim + binaural_dim -> width`. Pass `binaural_dim = 0` for
    /// the monaural configuration (spectral feature only).
    pub fn new(
        spectral_dim: usize,
        binaural_dim: usize,
        width: usize,
        vb: VarBuilder,
    ) -> Result<Self> {
        Ok(Self {
            lin: candle_nn::linear(spectral_dim + binaural_dim, width, vb)?,
            spectral_dim,
            binaural_dim,
        })
    }

    /// Concatenates `[.., m, D]` spectral with `[.., m, F]` binaural features
    /// and projects to `[.., m, H]`.
    pub fn assemble(&self, spectral: &Tensor, binaural: Option<&Tensor>) -> Result<Tensor> {
        if spectral.dim(D::Minus1)? != self.spectral_dim {
            return Err(Error::Contract(format!(
                "bottleneck expects spectral dim {}, got {}",
                self.spectral_dim,
                spectral.dim(D::Minus1)?
            )));
        }
        let joined = match binaural {
            Some(b) => {
                if b.dim(D::Minus1)? != self.binaural_dim {
                    return Err(Error::Contract(format!(
                        "bottleneck expects binaural dim {}, got {}",
                        self.binaural_dim,
                        b.dim(D::Minus1)?
                    )));
                }
                if b.dims()[..b.dims().len() - 1] != spectral.dims()[..spectral.dims().len() - 1] {
                    return Err(Error::Contract(format!(
                        "frame counts differ: {:?} vs {:?}",
                        spectral.dims(),
                        b.dims()
                    )));
                }
                Tensor::cat(&[spectral, b], D::Minus1)?
            }
            None => {
                if self.binaural_dim != 0 {
                    return Err(Error::Contract(
                        "bottleneck configured with a binaural feature but none provided".into(),
                    ));
                }
                spectral.clone()
            }
        };
        Ok(self.lin.forward(&joined)?)
    }
}
