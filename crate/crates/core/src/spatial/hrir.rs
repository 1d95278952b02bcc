//! Azimuth-indexed head-related impulse-response databases: loading measured
//! sets from a directory of WAV files and generating a synthetic
//! spherical-head fixture (interaural delay + level difference only).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::{read_wav_any_rate, resample, SAMPLE_RATE};
use crate::error::{Error, Result};

/// Speed of sound used by the spherical-head model, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

/// Impulse responses longer than this are truncated with a linear fade.
pub const MAX_IR_LEN: usize = 512;
const FADE_LEN: usize = 32;

/// Left/right impulse responses for one azimuth.
#[derive(Debug, Clone)]
pub struct HrirPair {
    pub azimuth_deg: i32,
    pub left: Vec<f32>,
    pub right: Vec<f32>,
}

/// Complete azimuth grid of HRIR pairs over [-90°, +90°].
#[derive(Debug, Clone)]
pub struct HrirDatabase {
    resolution_deg: i32,
    pairs: BTreeMap<i32, HrirPair>,
    source_tag: String,
    ir_len: usize,
}

/// Summary record for `inspect-hrir`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HrirSummary {
    pub source_tag: String,
    pub resolution_deg: i32,
    pub num_azimuths: usize,
    pub ir_len: usize,
    pub azimuth_min: i32,
    pub azimuth_max: i32,
}

impl HrirDatabase {
    fn from_pairs(
        resolution_deg: i32,
        mut pairs: BTreeMap<i32, HrirPair>,
        source_tag: &str,
    ) -> Result<Self> {
        let grid = azimuth_grid(resolution_deg)?;
        let missing: Vec<i32> = grid.iter().copied().filter(|a| !pairs.contains_key(a)).collect();
        if !missing.is_empty() {
            return Err(Error::HrirCoverage {
                missing,
                expected: grid.len(),
                resolution_deg,
            });
        }
        // pad to a common length, then bound latency at MAX_IR_LEN
        let ir_len = pairs
            .values()
            .map(|p| p.left.len().max(p.right.len()))
            .max()
            .unwrap_or(0);
        if ir_len == 0 {
            return Err(Error::HrirFormat("empty impulse responses".into()));
        }
        let ir_len = ir_len.min(MAX_IR_LEN);
        for pair in pairs.values_mut() {
            fit_ir(&mut pair.left, ir_len);
            fit_ir(&mut pair.right, ir_len);
        }
        Ok(Self {
            resolution_deg,
            pairs,
            source_tag: source_tag.to_string(),
            ir_len,
        })
    }

    pub fn resolution_deg(&self) -> i32 {
        self.resolution_deg
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn ir_len(&self) -> usize {
        self.ir_len
    }

    pub fn azimuths(&self) -> Vec<i32> {
        self.pairs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Exact grid lookup; interpolation is out of scope.
    pub fn get(&self, azimuth_deg: i32) -> Result<&HrirPair> {
        self.pairs.get(&azimuth_deg).ok_or(Error::AzimuthLookup {
            azimuth_deg,
            resolution_deg: self.resolution_deg,
        })
    }

    pub fn contains(&self, azimuth_deg: i32) -> bool {
        self.pairs.contains_key(&azimuth_deg)
    }

    pub fn summary(&self) -> HrirSummary {
        HrirSummary {
            source_tag: self.source_tag.clone(),
            resolution_deg: self.resolution_deg,
            num_azimuths: self.pairs.len(),
            ir_len: self.ir_len,
            azimuth_min: self.pairs.keys().next().copied().unwrap_or(0),
            azimuth_max: self.pairs.keys().next_back().copied().unwrap_or(0),
        }
    }
}

/// The full azimuth grid {-90, -90+Δθ, …, +90}.
pub fn azimuth_grid(resolution_deg: i32) -> Result<Vec<i32>> {
    if resolution_deg <= 0 || 180 % resolution_deg != 0 {
        return Err(Error::Parameter(format!(
            "resolution {resolution_deg}° must be positive and divide 180"
        )));
    }
    Ok((-90..=90).step_by(resolution_deg as usize).collect())
}

fn fit_ir(ir: &mut Vec<f32>, len: usize) {
    if ir.len() > len {
        ir.truncate(len);
        let fade = FADE_LEN.min(len);
        for i in 0..fade {
            let w = (fade - i) as f32 / (fade + 1) as f32;
            let ix = len - fade + i;
            ir[ix] *= w;
        }
    } else {
        ir.resize(len, 0.0);
    }
}

/// Loads `azi_{θ}{L|R}.wav` files (θ as signed integer degrees) from a
/// directory. Files not at 16 kHz are resampled.
pub fn load_hrir_db(root: &Path, expected_resolution_deg: i32) -> Result<HrirDatabase> {
    let grid = azimuth_grid(expected_resolution_deg)?;
    let mut pairs = BTreeMap::new();
    for &az in &grid {
        let left_path = root.join(format!("azi_{az}L.wav"));
        let right_path = root.join(format!("azi_{az}R.wav"));
        if !left_path.exists() || !right_path.exists() {
            continue;
        }
        pairs.insert(
            az,
            HrirPair {
                azimuth_deg: az,
                left: load_ir(&left_path)?,
                right: load_ir(&right_path)?,
            },
        );
    }
    HrirDatabase::from_pairs(expected_resolution_deg, pairs, "surrey-kemar")
}

/// Mapping-file override for other naming schemes: a JSON file listing the
/// left/right WAV path (relative to the map file) per azimuth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HrirNameMap {
    pub resolution_deg: i32,
    pub source_tag: Option<String>,
    pub entries: Vec<HrirNameMapEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HrirNameMapEntry {
    pub azimuth_deg: i32,
    pub left: String,
    pub right: String,
}

pub fn load_hrir_db_with_map(map_path: &Path) -> Result<HrirDatabase> {
    let text = std::fs::read_to_string(map_path).map_err(|e| Error::io(map_path, e))?;
    let map: HrirNameMap = serde_json::from_str(&text)?;
    let base = map_path.parent().unwrap_or_else(|| Path::new("."));
    let mut pairs = BTreeMap::new();
    for entry in &map.entries {
        pairs.insert(
            entry.azimuth_deg,
            HrirPair {
                azimuth_deg: entry.azimuth_deg,
                left: load_ir(&base.join(&entry.left))?,
                right: load_ir(&base.join(&entry.right))?,
            },
        );
    }
    let tag = map.source_tag.as_deref().unwrap_or("mapped");
    HrirDatabase::from_pairs(map.resolution_deg, pairs, tag)
}

fn load_ir(path: &Path) -> Result<Vec<f32>> {
    let (samples, rate) = read_wav_any_rate(path)?;
    if rate == SAMPLE_RATE {
        Ok(samples)
    } else {
        log::debug!("resampling {} from {rate} Hz", path.display());
        Ok(resample(&samples, rate, SAMPLE_RATE))
    }
}

/// Woodworth interaural time difference in seconds for a source at
/// `azimuth_deg` and a spherical head of the given radius:
/// `(r/c)·(θ + sin θ)` with θ the azimuth magnitude in radians.
pub fn woodworth_itd_s(head_radius_m: f64, azimuth_deg: f64) -> f64 {
    let theta = azimuth_deg.abs().to_radians().min(std::f64::consts::FRAC_PI_2);
    head_radius_m / SPEED_OF_SOUND * (theta + theta.sin())
}

/// Synthetic spherical-head HRIR generator: a single impulse per ear with
/// the spherical-head arrival delay and a frequency-independent shadow gain.
/// Azimuth 0° yields identical ears; ±θ are exact mirror images.
pub fn synth_spherical_hrir(
    resolution_deg: i32,
    head_radius_m: f64,
    ir_length: usize,
) -> Result<HrirDatabase> {
    if head_radius_m <= 0.0 {
        return Err(Error::Parameter("head radius must be positive".into()));
    }
    let grid = azimuth_grid(resolution_deg)?;
    let max_delay = ear_delay_samples(head_radius_m, 90.0, Ear::Left);
    if ir_length <= max_delay {
        return Err(Error::Parameter(format!(
            "ir_length {ir_length} too short for the maximum interaural delay ({max_delay} samples)"
        )));
    }
    let mut pairs = BTreeMap::new();
    for &az in &grid {
        let mut left = vec![0.0f32; ir_length];
        let mut right = vec![0.0f32; ir_length];
        left[ear_delay_samples(head_radius_m, az as f64, Ear::Left)] =
            ear_gain(az as f64, Ear::Left);
        right[ear_delay_samples(head_radius_m, az as f64, Ear::Right)] =
            ear_gain(az as f64, Ear::Right);
        pairs.insert(
            az,
            HrirPair {
                azimuth_deg: az,
                left,
                right,
            },
        );
    }
    HrirDatabase::from_pairs(resolution_deg, pairs, "synthetic-spherical")
}

#[derive(Clone, Copy)]
enum Ear {
    Left,
    Right,
}

/// Incidence angle between the source direction and the ear axis. Positive
/// azimuth is to the right, so the right ear faces a +90° source head-on.
fn incidence_angle(azimuth_deg: f64, ear: Ear) -> f64 {
    let sin_t = azimuth_deg.to_radians().sin();
    match ear {
        Ear::Right => sin_t.clamp(-1.0, 1.0).acos(),
        Ear::Left => (-sin_t).clamp(-1.0, 1.0).acos(),
    }
}

/// Arrival delay in whole samples, shifted so the earliest possible arrival
/// (ear facing the source) lands at index 0. For a visible ear the wavefront
/// leads by r·cos(φ)/c; a shadowed ear lags by the wrap path r·(φ - π/2)/c.
fn ear_delay_samples(head_radius_m: f64, azimuth_deg: f64, ear: Ear) -> usize {
    let phi = incidence_angle(azimuth_deg, ear);
    let rc = head_radius_m / SPEED_OF_SOUND;
    let tau = if phi <= std::f64::consts::FRAC_PI_2 {
        -rc * phi.cos()
    } else {
        rc * (phi - std::f64::consts::FRAC_PI_2)
    };
    ((tau + rc) * SAMPLE_RATE as f64).round() as usize
}

/// Broadband head-shadow gain in [0.3, 1.0].
fn ear_gain(azimuth_deg: f64, ear: Ear) -> f32 {
    let phi = incidence_angle(azimuth_deg, ear);
    (0.3 + 0.7 * (0.5 + 0.5 * phi.cos())) as f32
}
