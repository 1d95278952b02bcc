//! Sliding cosine similarity between a center frame and a context segment.
//!
//! The window slides one sample at a time, giving `K - N + 1` similarity
//! values per frame. Zero-norm windows produce similarity 0 via an ε-guard
//! on the denominators.

use super::geometry::{FrameBatch, FrameGeometry};

const NORM_EPS: f64 = 1e-8;

/// Cosine similarity of `center` against every length-N window of `segment`,
/// one-sample stride. Output length `K - N + 1`, values clamped to [-1, 1].
///
/// Window norms come from a running sum of squares; the per-offset dot
/// products are evaluated directly.
pub fn csim(center: &[f32], segment: &[f32]) -> Vec<f32> {
    let n = center.len();
    let k = segment.len();
    assert!(k >= n, "segment ({k}) shorter than center ({n})");
    let num = k - n + 1;

    let center64: Vec<f64> = center.iter().map(|&v| v as f64).collect();
    let seg64: Vec<f64> = segment.iter().map(|&v| v as f64).collect();
    let center_norm = center64.iter().map(|v| v * v).sum::<f64>().sqrt();

    // Running window energy: energy[j] = sum(seg[j..j+n]^2) maintained
    // incrementally instead of recomputed per offset.
    let mut window_energy = seg64[..n].iter().map(|v| v * v).sum::<f64>();

    let mut out = Vec::with_capacity(num);
    for j in 0..num {
        if j > 0 {
            let leaving = seg64[j - 1];
            let entering = seg64[j + n - 1];
            window_energy += entering * entering - leaving * leaving;
        }
        let dot: f64 = center64
            .iter()
            .zip(&seg64[j..j + n])
            .map(|(a, b)| a * b)
            .sum();
        let denom = center_norm.max(NORM_EPS) * window_energy.max(0.0).sqrt().max(NORM_EPS);
        out.push((dot / denom).clamp(-1.0, 1.0) as f32);
    }
    out
}

/// Per-frame binaural CSim features.
///
/// The left ear is the reference: its feature is the self-similarity of the
/// left frame against the left segment; the right feature compares the same
/// left frame against the right segment (cross-channel similarity). Each
/// output is `[m, K - N + 1]` row-major.
pub fn binaural_csim_features(batch: &FrameBatch) -> (Vec<f32>, Vec<f32>) {
    let geom = &batch.geom;
    let m = batch.num_frames();
    let f = geom.filter_len();
    let mut left = Vec::with_capacity(m * f);
    let mut right = Vec::with_capacity(m * f);
    for i in 0..m {
        let ref_frame = batch.left.frame(i, geom);
        left.extend_from_slice(&csim(ref_frame, batch.left.segment(i, geom)));
        right.extend_from_slice(&csim(ref_frame, batch.right.segment(i, geom)));
    }
    (left, right)
}

/// Monaural self-similarity feature for the configured single channel.
pub fn monaural_csim_feature(frames: &super::geometry::EarFrames, geom: &FrameGeometry) -> Vec<f32> {
    let m = frames.num_frames;
    let f = geom.filter_len();
    let mut out = Vec::with_capacity(m * f);
    for i in 0..m {
        out.extend_from_slice(&csim(frames.frame(i, geom), frames.segment(i, geom)));
    }
    out
}
