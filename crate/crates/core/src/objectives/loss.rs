//! Differentiable SI-SDR in the training graph, mirroring the metric in
//! `metrics` op for op (mean removal, projection, ε-guarded ratio, clamps).

use candle_core::Tensor;

use crate::error::{Error, Result};
use crate::objectives::metrics::{CEILING_DB, EPS, FLOOR_DB};

/// SI-SDR in dB as a scalar graph node. Both inputs are 1-D of equal length;
/// the reference is expected to be non-degenerate.
pub fn si_sdr_db_graph(estimate: &Tensor, reference: &Tensor) -> Result<Tensor> {
    if estimate.dims() != reference.dims() {
        return Err(Error::Contract(format!(
            "estimate {:?} vs reference {:?}",
            estimate.dims(),
            reference.dims()
        )));
    }
    let est = demean(estimate)?;
    let re = demean(reference)?;
    let dot_er = (&est * &re)?.sum_all()?;
    let dot_rr = (&re * &re)?.sum_all()?.maximum(EPS * EPS)?;
    let alpha = dot_er.broadcast_div(&dot_rr)?;
    let target = re.broadcast_mul(&alpha)?;
    let target_norm = (&target * &target)?.sum_all()?.sqrt()?;
    let err = (&target - &est)?;
    let err_norm = (&err * &err)?.sum_all()?.sqrt()?;
    let ratio = target_norm.broadcast_div(&err_norm.maximum(EPS)?)?;
    let db = ((ratio.log()? / std::f64::consts::LN_10)? * 20.0)?;
    Ok(db.clamp(FLOOR_DB, CEILING_DB)?)
}

/// Negated SI-SDR: the training loss.
pub fn si_sdr_loss_graph(estimate: &Tensor, reference: &Tensor) -> Result<Tensor> {
    Ok(si_sdr_db_graph(estimate, reference)?.neg()?)
}

fn demean(x: &Tensor) -> Result<Tensor> {
    let mu = x.mean_all()?;
    Ok(x.broadcast_sub(&mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::metrics;
    use candle_core::Device;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_sig(seed: u64, n: usize) -> Vec<f32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn graph_matches_metric_in_f64() {
        let dev = Device::Cpu;
        let est = rand_sig(1, 700);
        let re = rand_sig(2, 700);
        let want = metrics::si_sdr(&est, &re).unwrap();
        let et = Tensor::from_vec(est.iter().map(|&v| v as f64).collect::<Vec<_>>(), 700, &dev)
            .unwrap();
        let rt = Tensor::from_vec(re.iter().map(|&v| v as f64).collect::<Vec<_>>(), 700, &dev)
            .unwrap();
        let got = si_sdr_db_graph(&et, &rt).unwrap().to_scalar::<f64>().unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        let loss = si_sdr_loss_graph(&et, &rt).unwrap().to_scalar::<f64>().unwrap();
        assert!((loss + want).abs() < 1e-9);
    }

    #[test]
    fn graph_gradient_flows() {
        let dev = Device::Cpu;
        let est = candle_core::Var::from_tensor(
            &Tensor::from_vec(
                rand_sig(3, 300).iter().map(|&v| v as f64).collect::<Vec<_>>(),
                300,
                &dev,
            )
            .unwrap(),
        )
        .unwrap();
        let re = Tensor::from_vec(
            rand_sig(4, 300).iter().map(|&v| v as f64).collect::<Vec<_>>(),
            300,
            &dev,
        )
        .unwrap();
        let loss = si_sdr_loss_graph(est.as_tensor(), &re).unwrap();
        let grads = loss.backward().unwrap();
        let g = grads.get(est.as_tensor()).unwrap();
        let norm = g.sqr().unwrap().sum_all().unwrap().to_scalar::<f64>().unwrap();
        assert!(norm > 0.0);
    }
}
