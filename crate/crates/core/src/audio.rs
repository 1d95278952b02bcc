//! Mono audio clips and WAV I/O (16 kHz, 16-bit PCM or 32-bit float).

use std::path::Path;

use crate::error::{Error, Result};

/// The only sample rate this toolkit operates at.
pub const SAMPLE_RATE: u32 = 16_000;

/// A mono audio clip. Samples are finite and nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl AudioClip {
    /// Builds a clip, validating the sample-rate and finiteness invariants.
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate != SAMPLE_RATE {
            return Err(Error::AudioFormat(format!(
                "expected {SAMPLE_RATE} Hz, got {sample_rate} Hz"
            )));
        }
        if let Some(ix) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::AudioFormat(format!(
                "non-finite sample at index {ix}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Truncates (keeping the head) or zero-pads (at the tail) to `len` samples.
    pub fn fit_to(&self, len: usize) -> AudioClip {
        let mut samples = self.samples.clone();
        samples.resize(len, 0.0);
        AudioClip {
            samples,
            sample_rate: self.sample_rate,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.samples.iter().all(|s| s.abs() < 1e-6)
    }
}

/// Reads a mono WAV file. 16-bit PCM is scaled by 1/32768; 32-bit float is
/// taken as-is. Returns the samples and the file's sample rate.
pub fn read_wav_any_rate(path: &Path) -> Result<(Vec<f32>, u32)> {
    let mut reader = hound::WavReader::open(path).map_err(|source| Error::WavRead {
        path: path.to_path_buf(),
        source,
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::AudioFormat(format!(
            "{}: expected mono, got {} channels",
            path.display(),
            spec.channels
        )));
    }
    let samples: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|source| Error::WavRead {
                path: path.to_path_buf(),
                source,
            })?,
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|source| Error::WavRead {
                path: path.to_path_buf(),
                source,
            })?,
        (fmt, bits) => {
            return Err(Error::AudioFormat(format!(
                "{}: unsupported format {fmt:?}/{bits}-bit (need 16-bit PCM or 32-bit float)",
                path.display()
            )))
        }
    };
    Ok((samples, spec.sample_rate))
}

/// Reads a mono 16 kHz WAV into an [`AudioClip`].
pub fn read_wav(path: &Path) -> Result<AudioClip> {
    let (samples, rate) = read_wav_any_rate(path)?;
    if rate != SAMPLE_RATE {
        return Err(Error::AudioFormat(format!(
            "{}: expected {SAMPLE_RATE} Hz, got {rate} Hz",
            path.display()
        )));
    }
    AudioClip::new(samples, rate)
}

/// Writes a clip as mono 32-bit float WAV.
pub fn write_wav(path: &Path, clip: &AudioClip) -> Result<()> {
    write_wav_samples(path, clip.samples(), clip.sample_rate())
}

pub fn write_wav_samples(path: &Path, samples: &[f32], sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|source| Error::WavWrite {
        path: path.to_path_buf(),
        source,
    })?;
    for &s in samples {
        writer.write_sample(s).map_err(|source| Error::WavWrite {
            path: path.to_path_buf(),
            source,
        })?;
    }
    writer.finalize().map_err(|source| Error::WavWrite {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Windowed-sinc resampler used when an HRIR file is not at 16 kHz.
/// O(n·m) direct evaluation; impulse responses are short so this is cheap.
pub fn resample(input: &[f32], from_rate: u32, to_rate: u32) -> Vec<f32> {
    if from_rate == to_rate || input.is_empty() {
        return input.to_vec();
    }
    let ratio = to_rate as f64 / from_rate as f64;
    let out_len = (input.len() as f64 * ratio).round() as usize;
    let cutoff = ratio.min(1.0) * 0.95;
    let half_width = 32usize;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let center = n as f64 / ratio;
        let k0 = (center.floor() as isize - half_width as isize).max(0) as usize;
        let k1 = ((center.ceil() as isize + half_width as isize) as usize).min(input.len() - 1);
        let mut acc = 0.0f64;
        for k in k0..=k1 {
            let t = center - k as f64;
            let x = std::f64::consts::PI * t;
            let sinc = if x.abs() < 1e-12 {
                cutoff
            } else {
                (cutoff * x).sin() / x
            };
            // Hann window over the kernel support
            let w = 0.5 * (1.0 + (x / (half_width as f64 + 1.0)).cos());
            acc += input[k] as f64 * sinc * w;
        }
        out.push(acc as f32);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_rejects_wrong_rate() {
        assert!(AudioClip::new(vec![0.0; 10], 44_100).is_err());
    }

    #[test]
    fn clip_rejects_nan() {
        assert!(AudioClip::new(vec![0.0, f32::NAN], SAMPLE_RATE).is_err());
    }

    #[test]
    fn fit_to_pads_and_truncates() {
        let c = AudioClip::new(vec![1.0, 2.0, 3.0], SAMPLE_RATE).unwrap();
        assert_eq!(c.fit_to(5).samples(), &[1.0, 2.0, 3.0, 0.0, 0.0]);
        assert_eq!(c.fit_to(2).samples(), &[1.0, 2.0]);
    }

    #[test]
    fn wav_roundtrip_f32() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let clip = AudioClip::new(vec![0.25, -0.5, 0.125], SAMPLE_RATE).unwrap();
        write_wav(&path, &clip).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.samples(), clip.samples());
    }

    #[test]
    fn wav_rejects_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: SAMPLE_RATE,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..8 {
            w.write_sample(0.0f32).unwrap();
        }
        w.finalize().unwrap();
        assert!(read_wav(&path).is_err());
    }

    #[test]
    fn resample_halves_tone_length() {
        // 1 kHz tone at 32 kHz downsampled to 16 kHz keeps its frequency.
        let from = 32_000u32;
        let n = 3200;
        let tone: Vec<f32> = (0..n)
            .map(|i| (2.0 * std::f32::consts::PI * 1000.0 * i as f32 / from as f32).sin())
            .collect();
        let out = resample(&tone, from, SAMPLE_RATE);
        assert_eq!(out.len(), 1600);
        // zero crossings of a 1 kHz tone at 16 kHz: every 8 samples
        let expected: Vec<f32> = (0..out.len())
            .map(|i| (2.0 * std::f32::consts::PI * 1000.0 * i as f32 / SAMPLE_RATE as f32).sin())
            .collect();
        let err: f32 = out
            .iter()
            .zip(&expected)
            .skip(100)
            .take(1000)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max);
        assert!(err < 0.05, "max deviation {err}");
    }
}
