//! SI-SDR and SDR metrics with standardized degenerate-case guards.
//!
//! Values are clamped to [-80, +140] dB; the ε-guard on the error norm is
//! 1e-8, so identical signals hit the +140 ceiling and an all-zero estimate
//! hits the -80 floor.

use crate::error::{Error, Result};

pub const EPS: f64 = 1e-8;
pub const FLOOR_DB: f64 = -80.0;
pub const CEILING_DB: f64 = 140.0;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn demean(x: &[f32]) -> Vec<f64> {
    let mean = x.iter().map(|&v| v as f64).sum::<f64>() / x.len() as f64;
    x.iter().map(|&v| v as f64 - mean).collect()
}

/// Scale-invariant SDR in dB. Both signals are mean-normalized to zero, the
/// estimate is projected onto the reference, and the ratio of the projection
/// to the residual is reported:
/// `20·log10(‖s‖ / max(‖s − x̂‖, ε))` with `s = (x̂ᵀx / xᵀx)·x`.
pub fn si_sdr(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    check_pair(estimate, reference)?;
    let est = demean(estimate);
    let re = demean(reference);
    if norm(&re) == 0.0 {
        return Err(Error::Domain(
            "si_sdr reference is all-zero after mean removal".into(),
        ));
    }
    Ok(si_sdr_core(&est, &re))
}

/// SI-SDR without the mean-normalization step (the raw projection formula).
pub fn si_sdr_no_demean(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    check_pair(estimate, reference)?;
    let est: Vec<f64> = estimate.iter().map(|&v| v as f64).collect();
    let re: Vec<f64> = reference.iter().map(|&v| v as f64).collect();
    if norm(&re) == 0.0 {
        return Err(Error::Domain("si_sdr reference is all-zero".into()));
    }
    Ok(si_sdr_core(&est, &re))
}

fn si_sdr_core(est: &[f64], re: &[f64]) -> f64 {
    let alpha = dot(est, re) / dot(re, re);
    let target_norm: f64 = re
        .iter()
        .map(|r| {
            let s = alpha * r;
            s * s
        })
        .sum::<f64>()
        .sqrt();
    let err_norm: f64 = est
        .iter()
        .zip(re)
        .map(|(e, r)| {
            let d = alpha * r - e;
            d * d
        })
        .sum::<f64>()
        .sqrt();
    // numerator deliberately unguarded: an all-zero projection yields -inf,
    // which the clamp turns into the -80 dB floor
    let value = 20.0 * (target_norm / err_norm.max(EPS)).log10();
    value.clamp(FLOOR_DB, CEILING_DB)
}

/// Plain (non-scale-invariant) energy-ratio SDR in dB:
/// `20·log10(‖x‖ / max(‖x − x̂‖, ε))`.
pub fn sdr(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    check_pair(estimate, reference)?;
    let re: Vec<f64> = reference.iter().map(|&v| v as f64).collect();
    let ref_norm = norm(&re);
    if ref_norm == 0.0 {
        return Err(Error::Domain("sdr reference is all-zero".into()));
    }
    let err_norm: f64 = estimate
        .iter()
        .zip(&re)
        .map(|(&e, r)| {
            let d = r - e as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt();
    let value = 20.0 * (ref_norm / err_norm.max(EPS)).log10();
    Ok(value.clamp(FLOOR_DB, CEILING_DB))
}

/// The training loss is the negated SI-SDR metric.
pub fn si_sdr_loss_value(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    Ok(-si_sdr(estimate, reference)?)
}

fn check_pair(estimate: &[f32], reference: &[f32]) -> Result<()> {
    if estimate.len() != reference.len() {
        return Err(Error::Contract(format!(
            "estimate length {} != reference length {}",
            estimate.len(),
            reference.len()
        )));
    }
    if estimate.is_empty() {
        return Err(Error::Contract("empty signals".into()));
    }
    Ok(())
}
