//! Filter-and-sum beamforming per frame and Hann overlap-add synthesis.
//!
//! Each frame's estimated filters are applied to the two ears' context
//! segments by valid-mode correlation, the two ears are averaged, and the
//! resulting frames are overlap-added back into a waveform.

use crate::error::{Error, Result};
use crate::frontend::geometry::{hann_window, FrameBatch, FrameGeometry};

/// Precomputed synthesis state: Hann window and per-sample normalizer.
#[derive(Debug, Clone)]
pub struct ReconstructionPlan {
    pub geom: FrameGeometry,
    pub window: Vec<f32>,
    /// Sum of window values covering each output sample, clamped away from 0.
    pub normalizer: Vec<f32>,
    pub signal_len: usize,
}

impl ReconstructionPlan {
    pub fn new(geom: FrameGeometry, signal_len: usize) -> Result<Self> {
        let m = geom.num_frames(signal_len)?;
        let window = hann_window(geom.frame_len);
        let mut acc = vec![0.0f64; signal_len];
        for i in 0..m {
            let s = geom.frame_start(i);
            for j in 0..geom.frame_len {
                if s + j < signal_len {
                    acc[s + j] += window[j] as f64;
                }
            }
        }
        let normalizer = acc.iter().map(|&v| (v.max(1e-8)) as f32).collect();
        Ok(Self {
            geom,
            window,
            normalizer,
            signal_len,
        })
    }

    pub fn num_frames(&self) -> usize {
        // constructed from a validated signal length
        (self.signal_len - self.geom.frame_len) / self.geom.hop + 1
    }
}

/// Applies per-ear filters to the context segments by valid-mode correlation
/// and averages the two ears:
/// `out[n] = (Σ_j hl[j]·dl[j+n] + Σ_j hr[j]·dr[j+n]) / 2`, n in [0, N).
pub fn filter_and_sum(
    h_left: &[f32],
    h_right: &[f32],
    d_left: &[f32],
    d_right: &[f32],
    frame_len: usize,
) -> Result<Vec<f32>> {
    let f = d_left.len() + 1 - frame_len;
    if h_left.len() != f || h_right.len() != f {
        return Err(Error::Contract(format!(
            "filter length {} does not match segment {} - frame {} + 1",
            h_left.len(),
            d_left.len(),
            frame_len
        )));
    }
    if d_left.len() != d_right.len() || h_left.len() != h_right.len() {
        return Err(Error::Contract("left/right lengths differ".into()));
    }
    let mut out = Vec::with_capacity(frame_len);
    for n in 0..frame_len {
        let mut acc = 0.0f64;
        for j in 0..f {
            acc += h_left[j] as f64 * d_left[j + n] as f64;
            acc += h_right[j] as f64 * d_right[j + n] as f64;
        }
        out.push((acc / 2.0) as f32);
    }
    Ok(out)
}

/// Single-channel variant used by the monaural configuration (no /2).
pub fn filter_frame(h: &[f32], d: &[f32], frame_len: usize) -> Result<Vec<f32>> {
    let f = d.len() + 1 - frame_len;
    if h.len() != f {
        return Err(Error::Contract(format!(
            "filter length {} does not match segment {} - frame {} + 1",
            h.len(),
            d.len(),
            frame_len
        )));
    }
    let mut out = Vec::with_capacity(frame_len);
    for n in 0..frame_len {
        let acc: f64 = (0..f).map(|j| h[j] as f64 * d[j + n] as f64).sum();
        out.push(acc as f32);
    }
    Ok(out)
}

/// Hann-windowed overlap-add of `[m, N]` frames (row-major), normalized by
/// the per-sample window coverage. Output length is the plan's signal length.
pub fn overlap_add(frames: &[f32], plan: &ReconstructionPlan) -> Result<Vec<f32>> {
    let n = plan.geom.frame_len;
    let m = plan.num_frames();
    if frames.len() != m * n {
        return Err(Error::Contract(format!(
            "expected {m} frames of {n} samples, got {} values",
            frames.len()
        )));
    }
    let mut acc = vec![0.0f64; plan.signal_len];
    for i in 0..m {
        let s = plan.geom.frame_start(i);
        let row = &frames[i * n..(i + 1) * n];
        for j in 0..n {
            if s + j < plan.signal_len {
                acc[s + j] += (row[j] * plan.window[j]) as f64;
            }
        }
    }
    Ok(acc
        .iter()
        .zip(&plan.normalizer)
        .map(|(&v, &w)| (v / w as f64) as f32)
        .collect())
}

/// Per-frame estimated beamforming filters, `[m, filter_len]` row-major.
/// `right` is absent in the monaural configuration.
#[derive(Debug, Clone)]
pub struct BeamFilterSet {
    pub num_frames: usize,
    pub filter_len: usize,
    pub left: Vec<f32>,
    pub right: Option<Vec<f32>>,
}

impl BeamFilterSet {
    pub fn left_frame(&self, i: usize) -> &[f32] {
        &self.left[i * self.filter_len..(i + 1) * self.filter_len]
    }

    pub fn right_frame(&self, i: usize) -> Option<&[f32]> {
        self.right
            .as_ref()
            .map(|r| &r[i * self.filter_len..(i + 1) * self.filter_len])
    }
}

/// Filter-and-sum every frame, then overlap-add. Output length equals the
/// mixture length the batch was built from.
pub fn reconstruct(
    filters: &BeamFilterSet,
    batch: &FrameBatch,
    plan: &ReconstructionPlan,
) -> Result<Vec<f32>> {
    let geom = &batch.geom;
    let m = batch.num_frames();
    if filters.num_frames != m {
        return Err(Error::Contract(format!(
            "filter frames {} != batch frames {m}",
            filters.num_frames
        )));
    }
    if filters.filter_len != geom.filter_len() {
        return Err(Error::Contract(format!(
            "filter length {} != K - N + 1 = {}",
            filters.filter_len,
            geom.filter_len()
        )));
    }
    let n = geom.frame_len;
    let mut frames = vec![0.0f32; m * n];
    for i in 0..m {
        let out = match filters.right_frame(i) {
            Some(hr) => filter_and_sum(
                filters.left_frame(i),
                hr,
                batch.left.segment(i, geom),
                batch.right.segment(i, geom),
                n,
            )?,
            None => filter_frame(filters.left_frame(i), batch.left.segment(i, geom), n)?,
        };
        frames[i * n..(i + 1) * n].copy_from_slice(&out);
    }
    overlap_add(&frames, plan)
}

/// A filter set whose every frame is a centered unit impulse: reconstruction
/// with it averages the two center frames (identity-style filtering).
pub fn centered_delta_filters(m: usize, geom: &FrameGeometry, binaural: bool) -> BeamFilterSet {
    let f = geom.filter_len();
    let center = (geom.segment_len - geom.frame_len) / 2;
    let mut one = vec![0.0f32; m * f];
    for i in 0..m {
        one[i * f + center] = 1.0;
    }
    BeamFilterSet {
        num_frames: m,
        filter_len: f,
        left: one.clone(),
        right: binaural.then_some(one),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::geometry::frame_signal;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Nested-loop correlation + average oracle.
    fn filter_and_sum_oracle(
        hl: &[f32],
        hr: &[f32],
        dl: &[f32],
        dr: &[f32],
        n: usize,
    ) -> Vec<f32> {
        (0..n)
            .map(|t| {
                let mut acc = 0.0f64;
                for j in 0..hl.len() {
                    acc += hl[j] as f64 * dl[j + t] as f64 + hr[j] as f64 * dr[j + t] as f64;
                }
                (acc / 2.0) as f32
            })
            .collect()
    }

    #[test]
    fn centered_delta_selects_average_of_center_frames() {
        let geom = FrameGeometry::new(4, 2, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dl = rand_vec(&mut rng, 10);
        let dr = rand_vec(&mut rng, 10);
        let f = geom.filter_len();
        let center = (geom.segment_len - geom.frame_len) / 2;
        let mut h = vec![0.0f32; f];
        h[center] = 1.0;
        let out = filter_and_sum(&h, &h, &dl, &dr, geom.frame_len).unwrap();
        for t in 0..geom.frame_len {
            let want = (dl[center + t] + dr[center + t]) / 2.0;
            assert!((out[t] - want).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_right_filter_halves_left_frame() {
        let geom = FrameGeometry::new(4, 2, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dl = rand_vec(&mut rng, 10);
        let dr = rand_vec(&mut rng, 10);
        let f = geom.filter_len();
        let center = (geom.segment_len - geom.frame_len) / 2;
        let mut hl = vec![0.0f32; f];
        hl[center] = 1.0;
        let hr = vec![0.0f32; f];
        let out = filter_and_sum(&hl, &hr, &dl, &dr, geom.frame_len).unwrap();
        for t in 0..geom.frame_len {
            assert!((out[t] - dl[center + t] / 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn matches_bruteforce_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let n = 4;
            let k = 10;
            let f = k - n + 1;
            let hl = rand_vec(&mut rng, f);
            let hr = rand_vec(&mut rng, f);
            let dl = rand_vec(&mut rng, k);
            let dr = rand_vec(&mut rng, k);
            let got = filter_and_sum(&hl, &hr, &dl, &dr, n).unwrap();
            let want = filter_and_sum_oracle(&hl, &hr, &dl, &dr, n);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn length_mismatch_is_contract_error() {
        let out = filter_and_sum(&[1.0; 5], &[1.0; 5], &[0.0; 10], &[0.0; 10], 4);
        assert!(matches!(out, Err(Error::Contract(_))));
    }

    #[test]
    fn ola_identity_in_interior() {
        let geom = FrameGeometry::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = rand_vec(&mut rng, 4096);
        let ef = frame_signal(&x, &geom).unwrap();
        let plan = ReconstructionPlan::new(geom, x.len()).unwrap();
        let y = overlap_add(&ef.frames, &plan).unwrap();
        assert_eq!(y.len(), x.len());
        for t in geom.frame_len..x.len() - geom.frame_len {
            assert!((y[t] - x[t]).abs() < 1e-6, "t={t}: {} vs {}", y[t], x[t]);
        }
    }

    #[test]
    fn zero_frames_give_zero_waveform() {
        let geom = FrameGeometry::default();
        let plan = ReconstructionPlan::new(geom, 1024).unwrap();
        let m = plan.num_frames();
        let y = overlap_add(&vec![0.0; m * geom.frame_len], &plan).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_frame_boundary() {
        let geom = FrameGeometry::new(8, 4, 16).unwrap();
        let plan = ReconstructionPlan::new(geom, 8).unwrap();
        assert_eq!(plan.num_frames(), 1);
        let frame: Vec<f32> = (1..=8).map(|v| v as f32).collect();
        let y = overlap_add(&frame, &plan).unwrap();
        // single frame: windowed then normalized by the same window -> frame
        // itself wherever the window is above the clamp
        for t in 1..7 {
            assert!((y[t] - frame[t]).abs() < 1e-5, "t={t}: {}", y[t]);
        }
    }

    #[test]
    fn reconstruct_identity_on_common_channel() {
        // both ears identical + centered-delta filters -> reconstructs the
        // common channel in the interior
        let geom = FrameGeometry::default();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = rand_vec(&mut rng, 4000);
        let batch = FrameBatch::from_binaural(&x, &x, &geom).unwrap();
        let plan = ReconstructionPlan::new(geom, x.len()).unwrap();
        let filters = centered_delta_filters(batch.num_frames(), &geom, true);
        let y = reconstruct(&filters, &batch, &plan).unwrap();
        assert_eq!(y.len(), x.len());
        for t in geom.segment_len..x.len() - geom.segment_len {
            assert!((y[t] - x[t]).abs() < 1e-6, "t={t}: {} vs {}", y[t], x[t]);
        }
    }

    #[test]
    fn reconstruct_linear_in_filters() {
        let geom = FrameGeometry::new(8, 4, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l = rand_vec(&mut rng, 256);
        let r = rand_vec(&mut rng, 256);
        let batch = FrameBatch::from_binaural(&l, &r, &geom).unwrap();
        let plan = ReconstructionPlan::new(geom, l.len()).unwrap();
        let m = batch.num_frames();
        let f = geom.filter_len();
        let hl = rand_vec(&mut rng, m * f);
        let hr = rand_vec(&mut rng, m * f);
        let filters = BeamFilterSet {
            num_frames: m,
            filter_len: f,
            left: hl.clone(),
            right: Some(hr.clone()),
        };
        let a = 3.5f32;
        let scaled = BeamFilterSet {
            num_frames: m,
            filter_len: f,
            left: hl.iter().map(|v| v * a).collect(),
            right: Some(hr.iter().map(|v| v * a).collect()),
        };
        let y = reconstruct(&filters, &batch, &plan).unwrap();
        let ys = reconstruct(&scaled, &batch, &plan).unwrap();
        for (u, v) in y.iter().zip(&ys) {
            assert!((u * a - v).abs() < 1e-5 * (1.0 + v.abs()));
        }
    }
}
