//! Binaural rendering: FFT convolution of a clip with the HRIR pair for its
//! azimuth, truncated to the clip's length.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::audio::AudioClip;
use crate::error::Result;
use crate::spatial::hrir::HrirDatabase;

/// Convolves `clip` with the left/right impulse responses for `azimuth_deg`
/// and truncates both outputs to the clip's length.
pub fn spatialize(
    clip: &AudioClip,
    azimuth_deg: i32,
    db: &HrirDatabase,
) -> Result<(AudioClip, AudioClip)> {
    let pair = db.get(azimuth_deg)?;
    let left = convolve_truncated(clip.samples(), &pair.left, clip.len());
    let right = convolve_truncated(clip.samples(), &pair.right, clip.len());
    Ok((
        AudioClip::new(left, clip.sample_rate())?,
        AudioClip::new(right, clip.sample_rate())?,
    ))
}

/// Renders only the requested ear (used for the rendered reference signal).
pub fn spatialize_ear(
    samples: &[f32],
    azimuth_deg: i32,
    db: &HrirDatabase,
    left_ear: bool,
) -> Result<Vec<f32>> {
    let pair = db.get(azimuth_deg)?;
    let ir = if left_ear { &pair.left } else { &pair.right };
    Ok(convolve_truncated(samples, ir, samples.len()))
}

/// Full convolution via f64 FFT, truncated to `out_len` samples.
pub fn convolve_truncated(signal: &[f32], ir: &[f32], out_len: usize) -> Vec<f32> {
    if signal.is_empty() || ir.is_empty() {
        return vec![0.0; out_len];
    }
    let full = signal.len() + ir.len() - 1;
    let size = full.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut a: Vec<Complex64> = signal
        .iter()
        .map(|&v| Complex64::new(v as f64, 0.0))
        .chain(std::iter::repeat(Complex64::ZERO))
        .take(size)
        .collect();
    let mut b: Vec<Complex64> = ir
        .iter()
        .map(|&v| Complex64::new(v as f64, 0.0))
        .chain(std::iter::repeat(Complex64::ZERO))
        .take(size)
        .collect();
    fft.process(&mut a);
    fft.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    ifft.process(&mut a);
    let scale = 1.0 / size as f64;
    a.iter()
        .take(out_len)
        .map(|c| (c.re * scale) as f32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::SAMPLE_RATE;
    use crate::spatial::hrir::synth_spherical_hrir;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn naive_convolve(signal: &[f32], ir: &[f32], out_len: usize) -> Vec<f32> {
        let mut out = vec![0.0f64; out_len];
        for (t, o) in out.iter_mut().enumerate() {
            for (j, &h) in ir.iter().enumerate() {
                if t >= j && t - j < signal.len() {
                    *o += signal[t - j] as f64 * h as f64;
                }
            }
        }
        out.iter().map(|&v| v as f32).collect()
    }

    #[test]
    fn unit_impulse_ir_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f32> = (0..500).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut ir = vec![0.0f32; 16];
        ir[0] = 1.0;
        let y = convolve_truncated(&x, &ir, x.len());
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn matches_direct_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f32> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ir: Vec<f32> = (0..37).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = convolve_truncated(&x, &ir, x.len());
        let want = naive_convolve(&x, &ir, x.len());
        let scale = want.iter().map(|v| v.abs()).fold(0.0f32, f32::max).max(1.0);
        for (g, w) in got.iter().zip(&want) {
            assert!(
                (g - w).abs() / scale < 1e-6,
                "relative error too large: {g} vs {w}"
            );
        }
    }

    #[test]
    fn zero_azimuth_gives_identical_ears() {
        let db = synth_spherical_hrir(15, 0.0875, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f32> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let clip = AudioClip::new(x, SAMPLE_RATE).unwrap();
        let (l, r) = spatialize(&clip, 0, &db).unwrap();
        assert_eq!(l.samples(), r.samples());
    }

    #[test]
    fn off_grid_azimuth_is_lookup_error() {
        let db = synth_spherical_hrir(15, 0.0875, 32).unwrap();
        let clip = AudioClip::new(vec![0.1; 100], SAMPLE_RATE).unwrap();
        assert!(matches!(
            spatialize(&clip, 7, &db),
            Err(crate::error::Error::AzimuthLookup { .. })
        ));
    }

    #[test]
    fn spatialization_is_linear() {
        let db = synth_spherical_hrir(15, 0.0875, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f32> = (0..800).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f32> = (0..800).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, b) = (0.7f32, -1.3f32);
        let combo: Vec<f32> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let clip = |s: Vec<f32>| AudioClip::new(s, SAMPLE_RATE).unwrap();
        let (lc, _) = spatialize(&clip(combo), 30, &db).unwrap();
        let (lx, _) = spatialize(&clip(x), 30, &db).unwrap();
        let (ly, _) = spatialize(&clip(y), 30, &db).unwrap();
        for i in 0..800 {
            let want = a * lx.samples()[i] + b * ly.samples()[i];
            assert!((lc.samples()[i] - want).abs() < 1e-6);
        }
    }
}
