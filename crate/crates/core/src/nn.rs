//! Shared network building blocks on top of candle.
//!
//! Layer norm and PReLU are composed from primitive ops rather than the
//! fused candle-nn kernels so that every dtype (notably f64, used by the
//! finite-difference gradient checks) is supported with a full backward pass.

use candle_core::{DType, Tensor, Var, D};
use candle_nn::{VarBuilder, VarMap, RNN};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Layer normalization over the last (feature) axis with learned affine.
#[derive(Debug, Clone)]
pub struct LayerNorm {
    gamma: Tensor,
    beta: Tensor,
    eps: f64,
}

pub fn layer_norm(dim: usize, vb: VarBuilder) -> Result<LayerNorm> {
    let gamma = vb.get_with_hints(dim, "gamma", candle_nn::Init::Const(1.0))?;
    let beta = vb.get_with_hints(dim, "beta", candle_nn::Init::Const(0.0))?;
    Ok(LayerNorm {
        gamma,
        beta,
        eps: 1e-5,
    })
}

impl LayerNorm {
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let mu = x.mean_keepdim(D::Minus1)?;
        let centered = x.broadcast_sub(&mu)?;
        let var = centered.sqr()?.mean_keepdim(D::Minus1)?;
        let normed = centered.broadcast_div(&(var + self.eps)?.sqrt()?)?;
        Ok(normed
            .broadcast_mul(&self.gamma)?
            .broadcast_add(&self.beta)?)
    }
}

/// PReLU with a single learned slope.
#[derive(Debug, Clone)]
pub struct Prelu {
    alpha: Tensor,
}

pub fn prelu(vb: VarBuilder) -> Result<Prelu> {
    let alpha = vb.get_with_hints(1, "prelu", candle_nn::Init::Const(0.25))?;
    Ok(Prelu { alpha })
}

impl Prelu {
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        // prelu(x) = relu(x) - alpha * relu(-x)
        let pos = x.relu()?;
        let neg = x.neg()?.relu()?.broadcast_mul(&self.alpha)?;
        Ok((pos - neg)?)
    }
}

/// Bidirectional LSTM: a forward and a reversed pass concatenated on the
/// feature axis. Input `[batch, time, in]`, output `[batch, time, 2*hidden]`.
#[derive(Debug, Clone)]
pub struct BLstm {
    fwd: candle_nn::LSTM,
    bwd: candle_nn::LSTM,
}

pub fn blstm(in_dim: usize, hidden: usize, vb: VarBuilder) -> Result<BLstm> {
    let cfg = candle_nn::LSTMConfig::default();
    Ok(BLstm {
        fwd: candle_nn::lstm(in_dim, hidden, cfg.clone(), vb.pp("fwd"))?,
        bwd: candle_nn::lstm(in_dim, hidden, cfg, vb.pp("bwd"))?,
    })
}

impl BLstm {
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let fwd_states = self.fwd.seq(x)?;
        let fwd_out = self.fwd.states_to_tensor(&fwd_states)?;
        let rev = reverse_time(x)?;
        let bwd_states = self.bwd.seq(&rev)?;
        let bwd_out = reverse_time(&self.bwd.states_to_tensor(&bwd_states)?)?;
        Ok(Tensor::cat(&[&fwd_out, &bwd_out], D::Minus1)?)
    }
}

/// Reverses a `[batch, time, feat]` tensor along the time axis.
pub fn reverse_time(x: &Tensor) -> Result<Tensor> {
    let t = x.dim(1)?;
    let idx: Vec<u32> = (0..t as u32).rev().collect();
    let idx = Tensor::from_vec(idx, t, x.device())?;
    Ok(x.contiguous()?.index_select(&idx, 1)?)
}

/// Deterministically re-initializes every variable in the map from a seeded
/// RNG, walking names in sorted order. Conventions:
/// `*.gamma` -> 1, `*.beta` -> 0, `*.prelu` -> 0.25, `*bias*` -> U(±0.05),
/// anything else -> U(±1/sqrt(fan_in)) with fan_in = numel / dims[0].
pub fn reinit_varmap(varmap: &VarMap, seed: u64) -> Result<()> {
    let data = varmap.data().lock().unwrap();
    let mut names: Vec<String> = data.keys().cloned().collect();
    names.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in &names {
        let var = &data[name];
        let shape = var.shape().clone();
        let numel = shape.elem_count();
        let values: Vec<f64> = if name.ends_with(".gamma") {
            vec![1.0; numel]
        } else if name.ends_with(".beta") {
            vec![0.0; numel]
        } else if name.ends_with(".prelu") {
            vec![0.25; numel]
        } else if name.contains("bias") {
            (0..numel).map(|_| rng.random_range(-0.05..0.05)).collect()
        } else {
            let fan_in = (numel / shape.dims()[0].max(1)).max(1);
            let bound = 1.0 / (fan_in as f64).sqrt();
            (0..numel)
                .map(|_| rng.random_range(-bound..bound))
                .collect()
        };
        let t = Tensor::from_vec(values, shape.dims(), var.device())?.to_dtype(var.dtype())?;
        var.set(&t)?;
    }
    Ok(())
}

/// Collects (name, var) pairs sorted by name.
pub fn sorted_vars(varmap: &VarMap) -> Vec<(String, Var)> {
    let data = varmap.data().lock().unwrap();
    let mut out: Vec<(String, Var)> = data.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Builds a tensor of the model's dtype from f32 data.
pub fn tensor_from_f32(
    data: &[f32],
    shape: &[usize],
    dtype: DType,
    device: &candle_core::Device,
) -> Result<Tensor> {
    let t = Tensor::from_vec(data.to_vec(), shape, device)?;
    Ok(t.to_dtype(dtype)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::Device;

    #[test]
    fn layer_norm_normalizes_rows() {
        let dev = Device::Cpu;
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F64, &dev);
        let ln = layer_norm(8, vb.pp("ln")).unwrap();
        let x = Tensor::rand(-2f64, 2f64, (5, 8), &dev).unwrap();
        let y = ln.forward(&x).unwrap();
        let rows = y.to_vec2::<f64>().unwrap();
        for row in rows {
            let mean: f64 = row.iter().sum::<f64>() / 8.0;
            let var: f64 = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 8.0;
            assert!(mean.abs() < 1e-10);
            assert!((var - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn prelu_matches_definition() {
        let dev = Device::Cpu;
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F64, &dev);
        let p = prelu(vb.pp("p")).unwrap();
        let x = Tensor::new(&[-2.0f64, -0.5, 0.0, 0.5, 2.0], &dev).unwrap();
        let y = p.forward(&x).unwrap().to_vec1::<f64>().unwrap();
        let want = [-0.5, -0.125, 0.0, 0.5, 2.0];
        for (g, w) in y.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn blstm_shape_and_determinism() {
        let dev = Device::Cpu;
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &dev);
        let net = blstm(6, 4, vb.pp("b")).unwrap();
        reinit_varmap(&varmap, 42).unwrap();
        let x = Tensor::rand(-1f32, 1f32, (3, 7, 6), &dev).unwrap();
        let y1 = net.forward(&x).unwrap();
        assert_eq!(y1.dims(), &[3, 7, 8]);
        let y2 = net.forward(&x).unwrap();
        let a = y1.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        let b = y2.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reinit_is_deterministic_and_seed_sensitive() {
        let dev = Device::Cpu;
        let mk = || {
            let varmap = VarMap::new();
            let vb = VarBuilder::from_varmap(&varmap, DType::F32, &dev);
            let _ = candle_nn::linear(4, 4, vb.pp("a")).unwrap();
            let _ = blstm(4, 2, vb.pp("b")).unwrap();
            varmap
        };
        let v1 = mk();
        let v2 = mk();
        reinit_varmap(&v1, 7).unwrap();
        reinit_varmap(&v2, 7).unwrap();
        for ((n1, a), (n2, b)) in sorted_vars(&v1).iter().zip(sorted_vars(&v2).iter()) {
            assert_eq!(n1, n2);
            let a = a.flatten_all().unwrap().to_vec1::<f32>().unwrap();
            let b = b.flatten_all().unwrap().to_vec1::<f32>().unwrap();
            assert_eq!(a, b, "{n1}");
        }
        let v3 = mk();
        reinit_varmap(&v3, 8).unwrap();
        let a = sorted_vars(&v1)[0].1.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        let b = sorted_vars(&v3)[0].1.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn reverse_time_flips() {
        let dev = Device::Cpu;
        let x = Tensor::new(&[[[1f32], [2.], [3.]]], &dev).unwrap();
        let y = reverse_time(&x).unwrap();
        assert_eq!(
            y.flatten_all().unwrap().to_vec1::<f32>().unwrap(),
            vec![3.0, 2.0, 1.0]
        );
    }
}
