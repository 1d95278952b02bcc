//! Frame/segment geometry: short center frames with longer centered context
//! segments, plus the Hann synthesis window used at reconstruction.

use crate::error::{Error, Result};

/// Frame and context-segment geometry.
///
/// Defaults: 64-sample frames (4 ms) at 50% hop, 576-sample context
/// segments (36 ms) centered on each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FrameGeometry {
    /// Center-frame length in samples.
    pub frame_len: usize,
    /// Hop between consecutive frames, must divide `frame_len`.
    pub hop: usize,
    /// Context-segment length in samples, same parity as `frame_len`.
    pub segment_len: usize,
}

impl Default for FrameGeometry {
    fn default() -> Self {
        Self {
            frame_len: 64,
            hop: 32,
            segment_len: 576,
        }
    }
}

impl FrameGeometry {
    pub fn new(frame_len: usize, hop: usize, segment_len: usize) -> Result<Self> {
        if frame_len == 0 || hop == 0 {
            return Err(Error::Parameter("frame_len and hop must be positive".into()));
        }
        if segment_len <= frame_len {
            return Err(Error::Parameter(format!(
                "segment_len ({segment_len}) must exceed frame_len ({frame_len})"
            )));
        }
        if segment_len % 2 != frame_len % 2 {
            return Err(Error::Parameter(
                "segment_len and frame_len must have equal parity so segments center on frames"
                    .into(),
            ));
        }
        if frame_len % hop != 0 {
            return Err(Error::Parameter(format!(
                "hop ({hop}) must divide frame_len ({frame_len})"
            )));
        }
        Ok(Self {
            frame_len,
            hop,
            segment_len,
        })
    }

    /// Number of frames for a signal of length `len`.
    pub fn num_frames(&self, len: usize) -> Result<usize> {
        if len < self.frame_len {
            return Err(Error::InputTooShort {
                len,
                frame_len: self.frame_len,
            });
        }
        Ok((len - self.frame_len) / self.hop + 1)
    }

    /// Length of the per-frame binaural feature and of the beamforming
    /// filters: segment_len - frame_len + 1.
    pub fn filter_len(&self) -> usize {
        self.segment_len - self.frame_len + 1
    }

    /// Sample offset of frame `i`'s first sample.
    pub fn frame_start(&self, i: usize) -> usize {
        i * self.hop
    }

    /// Signed sample offset of segment `i`'s first sample; negative at the
    /// signal head (zero-padded region).
    pub fn segment_start(&self, i: usize) -> isize {
        self.frame_start(i) as isize - ((self.segment_len - self.frame_len) / 2) as isize
    }
}

/// Periodic Hann window of length `n`; satisfies constant-overlap-add
/// exactly at hop n/2.
pub fn hann_window(n: usize) -> Vec<f32> {
    (0..n)
        .map(|i| (0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())) as f32)
        .collect()
}

/// Frames and context segments for one ear, in row-major `[m, len]` layout.
#[derive(Debug, Clone)]
pub struct EarFrames {
    pub num_frames: usize,
    /// Center frames, `num_frames * frame_len` values.
    pub frames: Vec<f32>,
    /// Context segments, `num_frames * segment_len` values, zero-padded at
    /// the signal edges.
    pub segments: Vec<f32>,
}

impl EarFrames {
    pub fn frame(&self, i: usize, geom: &FrameGeometry) -> &[f32] {
        &self.frames[i * geom.frame_len..(i + 1) * geom.frame_len]
    }

    pub fn segment(&self, i: usize, geom: &FrameGeometry) -> &[f32] {
        &self.segments[i * geom.segment_len..(i + 1) * geom.segment_len]
    }
}

/// Per-frame center windows and context segments for both ears.
#[derive(Debug, Clone)]
pub struct FrameBatch {
    pub geom: FrameGeometry,
    pub signal_len: usize,
    pub left: EarFrames,
    pub right: EarFrames,
}

impl FrameBatch {
    pub fn from_binaural(left: &[f32], right: &[f32], geom: &FrameGeometry) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::Contract(format!(
                "left/right lengths differ: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Self {
            geom: *geom,
            signal_len: left.len(),
            left: frame_signal(left, geom)?,
            right: frame_signal(right, geom)?,
        })
    }

    pub fn num_frames(&self) -> usize {
        self.left.num_frames
    }
}

/// Splits `x` into center frames and zero-padded centered context segments.
pub fn frame_signal(x: &[f32], geom: &FrameGeometry) -> Result<EarFrames> {
    let m = geom.num_frames(x.len())?;
    let n = geom.frame_len;
    let k = geom.segment_len;
    let mut frames = vec![0.0f32; m * n];
    let mut segments = vec![0.0f32; m * k];
    for i in 0..m {
        let fs = geom.frame_start(i);
        frames[i * n..(i + 1) * n].copy_from_slice(&x[fs..fs + n]);
        let ss = geom.segment_start(i);
        for j in 0..k {
            let t = ss + j as isize;
            if t >= 0 && (t as usize) < x.len() {
                segments[i * k + j] = x[t as usize];
            }
        }
    }
    Ok(EarFrames {
        num_frames: m,
        frames,
        segments,
    })
}
