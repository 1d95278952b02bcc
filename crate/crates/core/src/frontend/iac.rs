//! Inter-channel attention correlation: softmax-normalized interaction of
//! the two ears' learned spectral features. Both separators receive the
//! same IAC feature.

use candle_core::{Tensor, D};
use candle_nn::{Module, VarBuilder};

use crate::error::{Error, Result};

/// Row-stochastic attention matrix per frame: softmax over the second index
/// of the outer product `C1_i · C2_iᵀ`. Input `[m, D]` per ear, output
/// `[m, D, D]` with every row summing to 1.
pub fn iac_attention(c1: &Tensor, c2: &Tensor) -> Result<Tensor> {
    if c1.dims() != c2.dims() {
        return Err(Error::Contract(format!(
            "iac feature shapes differ: {:?} vs {:?}",
            c1.dims(),
            c2.dims()
        )));
    }
    let outer = c1.unsqueeze(2)?.matmul(&c2.unsqueeze(1)?)?;
    Ok(candle_nn::ops::softmax(&outer, D::Minus1)?)
}

/// Learned projection of the flattened per-frame attention matrix (D*D)
/// down to the feature width D.
#[derive(Debug, Clone)]
pub struct IacProjection {
    proj: candle_nn::Linear,
    feat_dim: usize,
}

impl IacProjection {
    pub fn new(feat_dim: usize, vb: VarBuilder) -> Result<Self> {
        Ok(Self {
            proj: candle_nn::linear(feat_dim * feat_dim, feat_dim, vb)?,
            feat_dim,
        })
    }

    /// `[m, D]` spectral features per ear -> `[m, D]` IAC feature.
    pub fn features(&self, c1: &Tensor, c2: &Tensor) -> Result<Tensor> {
        let d = self.feat_dim;
        if c1.dim(D::Minus1)? != d {
            return Err(Error::Contract(format!(
                "iac projection expects feature dim {d}, got {}",
                c1.dim(D::Minus1)?
            )));
        }
        let attn = iac_attention(c1, c2)?;
        let m = attn.dim(0)?;
        let flat = attn.reshape((m, d * d))?;
        Ok(self.proj.forward(&flat)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::reinit_varmap;
    use candle_core::{DType, Device};
    use candle_nn::VarMap;

    #[test]
    fn zero_second_argument_gives_uniform_rows() {
        let dev = Device::Cpu;
        let c1 = Tensor::rand(-1f32, 1f32, (3, 64), &dev).unwrap();
        let c2 = Tensor::zeros((3, 64), DType::F32, &dev).unwrap();
        let a = iac_attention(&c1, &c2).unwrap();
        let vals = a.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        for v in vals {
            assert!((v - 1.0 / 64.0).abs() < 1e-7, "{v}");
        }
    }

    #[test]
    fn rows_sum_to_one_and_are_positive() {
        let dev = Device::Cpu;
        let c1 = Tensor::rand(-2f32, 2f32, (5, 16), &dev).unwrap();
        let c2 = Tensor::rand(-2f32, 2f32, (5, 16), &dev).unwrap();
        let a = iac_attention(&c1, &c2).unwrap();
        let sums = a.sum(D::Minus1).unwrap().flatten_all().unwrap().to_vec1::<f32>().unwrap();
        for s in sums {
            assert!((s - 1.0).abs() < 1e-6);
        }
        let vals = a.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        assert!(vals.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn matches_exp_sum_oracle_d4() {
        let dev = Device::Cpu;
        let c1v = vec![0.3f32, -0.7, 0.2, 1.1];
        let c2v = vec![-0.4f32, 0.9, 0.05, -1.3];
        let c1 = Tensor::from_vec(c1v.clone(), (1, 4), &dev).unwrap();
        let c2 = Tensor::from_vec(c2v.clone(), (1, 4), &dev).unwrap();
        let a = iac_attention(&c1, &c2).unwrap();
        let got = a.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        // brute-force oracle: logits[i][j] = c1[i]*c2[j]; softmax per row
        for i in 0..4 {
            let logits: Vec<f64> = (0..4).map(|j| (c1v[i] * c2v[j]) as f64).collect();
            let mx = logits.iter().cloned().fold(f64::MIN, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - mx).exp()).collect();
            let total: f64 = exps.iter().sum();
            for j in 0..4 {
                let want = (exps[j] / total) as f32;
                assert!(
                    (got[i * 4 + j] - want).abs() < 1e-6,
                    "[{i}][{j}]: {} vs {want}",
                    got[i * 4 + j]
                );
            }
        }
    }

    #[test]
    fn projection_outputs_feature_width() {
        let dev = Device::Cpu;
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &dev);
        let proj = IacProjection::new(8, vb.pp("iac")).unwrap();
        reinit_varmap(&varmap, 3).unwrap();
        let c1 = Tensor::rand(-1f32, 1f32, (7, 8), &dev).unwrap();
        let c2 = Tensor::rand(-1f32, 1f32, (7, 8), &dev).unwrap();
        let f = proj.features(&c1, &c2).unwrap();
        assert_eq!(f.dims(), &[7, 8]);
    }
}
