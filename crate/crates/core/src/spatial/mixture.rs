//! Two-speaker binaural mixture synthesis: activity placement at a sampled
//! overlap ratio, relative-SNR gain over the overlapped region, HRIR
//! spatialization per source, and per-ear summation.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::{read_wav, AudioClip, SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::spatial::corpus::SpeechCorpus;
use crate::spatial::hrir::HrirDatabase;
use crate::spatial::render::{spatialize_ear, convolve_truncated};

/// Everything needed to deterministically synthesize one mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub num_sources: usize,
    pub duration_s: f64,
    /// Fraction of the shorter activity that overlaps the other source.
    pub overlap_ratio: f64,
    /// Target-to-interferer power ratio over the overlapped region, dB.
    pub relative_snr_db: f64,
    /// One azimuth per source; the first is the target's.
    pub azimuths: Vec<i32>,
    pub enrollment_duration_s: f64,
    pub rng_seed: u64,
}

impl MixtureSpec {
    pub fn validate(&self, db: &HrirDatabase) -> Result<()> {
        if self.num_sources != 2 {
            return Err(Error::Parameter(format!(
                "mixture synthesis supports exactly 2 sources, got {}",
                self.num_sources
            )));
        }
        if self.azimuths.len() != self.num_sources {
            return Err(Error::Parameter(format!(
                "{} azimuths for {} sources",
                self.azimuths.len(),
                self.num_sources
            )));
        }
        if !(0.0..=1.0).contains(&self.overlap_ratio) {
            return Err(Error::Parameter(format!(
                "overlap_ratio {} outside [0, 1]",
                self.overlap_ratio
            )));
        }
        if self.duration_s <= 0.0 || self.enrollment_duration_s <= 0.0 {
            return Err(Error::Parameter("durations must be positive".into()));
        }
        for &az in &self.azimuths {
            if !db.contains(az) {
                return Err(Error::AzimuthLookup {
                    azimuth_deg: az,
                    resolution_deg: db.resolution_deg(),
                });
            }
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        (self.duration_s * SAMPLE_RATE as f64).round() as usize
    }

    pub fn enrollment_samples(&self) -> usize {
        (self.enrollment_duration_s * SAMPLE_RATE as f64).round() as usize
    }
}

/// One synthesized training/evaluation item.
#[derive(Debug, Clone)]
pub struct MixtureExample {
    pub mix_left: AudioClip,
    pub mix_right: AudioClip,
    /// Clean monaural target lane after SNR gain (the `dry` reference).
    pub target_reference: AudioClip,
    /// The target lane rendered through its left-ear HRIR (the
    /// `rendered_left` reference option).
    pub target_rendered_left: AudioClip,
    pub enrollment: AudioClip,
    pub spec: MixtureSpec,
    pub target_speaker_id: String,
    pub interferer_speaker_ids: Vec<String>,
}

/// Internals exposed for property tests: placed source lanes, applied gains
/// and the active intervals.
#[derive(Debug, Clone)]
pub struct MixtureDebug {
    /// Gain-scaled dry lanes, one per source, target first.
    pub lanes: Vec<Vec<f32>>,
    pub gains: Vec<f64>,
    /// Active sample intervals `[start, end)`, target first.
    pub intervals: Vec<(usize, usize)>,
    /// Measured overlap: |intersection| / min activity length.
    pub measured_overlap: f64,
}

pub fn make_mixture(
    spec: &MixtureSpec,
    corpus: &SpeechCorpus,
    db: &HrirDatabase,
) -> Result<MixtureExample> {
    Ok(make_mixture_debug(spec, corpus, db)?.0)
}

/// The same mixture twice with the two speaker roles swapped: identical
/// binaural input, different target. Requires `relative_snr_db == 0` so the
/// swapped spec stays within the protocol's SNR range.
pub fn make_mixture_pair(
    spec: &MixtureSpec,
    corpus: &SpeechCorpus,
    db: &HrirDatabase,
) -> Result<(MixtureExample, MixtureExample)> {
    if spec.relative_snr_db != 0.0 {
        return Err(Error::Parameter(
            "role-swapped pairs require relative_snr_db = 0".into(),
        ));
    }
    let (primary, ctx) = build(spec, corpus, db, true)?;
    let swapped = swap_roles(&primary, &ctx, corpus, db)?;
    Ok((primary, swapped))
}

pub fn make_mixture_debug(
    spec: &MixtureSpec,
    corpus: &SpeechCorpus,
    db: &HrirDatabase,
) -> Result<(MixtureExample, MixtureDebug)> {
    let (example, ctx) = build(spec, corpus, db, false)?;
    Ok((example, ctx.debug))
}

struct BuildContext {
    debug: MixtureDebug,
    speaker_ids: Vec<String>,
    /// Enrollment for the interferer, drawn only when a pair is requested.
    interferer_enrollment: Option<AudioClip>,
}

fn build(
    spec: &MixtureSpec,
    corpus: &SpeechCorpus,
    db: &HrirDatabase,
    with_interferer_enrollment: bool,
) -> Result<(MixtureExample, BuildContext)> {
    spec.validate(db)?;
    if corpus.num_speakers() < spec.num_sources {
        return Err(Error::Corpus(format!(
            "corpus has {} speakers, need {}",
            corpus.num_speakers(),
            spec.num_sources
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let t = spec.num_samples();
    let active_len = t / 2;

    // distinct speakers, target first
    let names: Vec<String> = corpus.speakers().iter().map(|s| s.to_string()).collect();
    let chosen: Vec<String> = names
        .choose_multiple(&mut rng, spec.num_sources)
        .cloned()
        .collect();
    let target_speaker = chosen[0].clone();
    let interferer_speaker = chosen[1].clone();

    // utterances: target content, target enrollment (disjoint), interferer content
    let (target_utt_ix, target_content) =
        pick_utterance(&mut rng, corpus, &target_speaker, &[], active_len)?;
    let (_, enrollment) = pick_utterance(
        &mut rng,
        corpus,
        &target_speaker,
        &[target_utt_ix],
        spec.enrollment_samples(),
    )?;
    let (interferer_utt_ix, interferer_content) =
        pick_utterance(&mut rng, corpus, &interferer_speaker, &[], active_len)?;
    let interferer_enrollment = if with_interferer_enrollment {
        let (_, e) = pick_utterance(
            &mut rng,
            corpus,
            &interferer_speaker,
            &[interferer_utt_ix],
            spec.enrollment_samples(),
        )?;
        Some(e)
    } else {
        None
    };

    // activity placement at the sampled overlap ratio
    let ov = (spec.overlap_ratio * active_len as f64).round() as usize;
    let span = 2 * active_len - ov;
    debug_assert!(span <= t);
    let span_start = rng.random_range(0..=(t - span));
    let target_leads = rng.random_bool(0.5);
    let (target_start, interferer_start) = if target_leads {
        (span_start, span_start + active_len - ov)
    } else {
        (span_start + active_len - ov, span_start)
    };

    let mut lanes = vec![vec![0.0f32; t], vec![0.0f32; t]];
    lanes[0][target_start..target_start + active_len]
        .copy_from_slice(&target_content.samples()[..active_len]);
    lanes[1][interferer_start..interferer_start + active_len]
        .copy_from_slice(&interferer_content.samples()[..active_len]);

    let intervals = [
        (target_start, target_start + active_len),
        (interferer_start, interferer_start + active_len),
    ];

    // gain on the interferer so target-to-interferer power over the
    // intersection matches the requested relative SNR; disjoint activities
    // fall back to full-activity power
    let isect = intersection(intervals[0], intervals[1]);
    let power = |lane: &[f32], range: (usize, usize)| -> f64 {
        let (a, b) = range;
        lane[a..b].iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>() / (b - a).max(1) as f64
    };
    let (p_target, p_interf) = match isect {
        Some(r) => (power(&lanes[0], r), power(&lanes[1], r)),
        None => (power(&lanes[0], intervals[0]), power(&lanes[1], intervals[1])),
    };
    if p_target <= 0.0 || p_interf <= 0.0 {
        return Err(Error::Corpus(
            "a source is silent over the SNR measurement region".into(),
        ));
    }
    let gain = (p_target / (p_interf * 10f64.powf(spec.relative_snr_db / 10.0))).sqrt();
    for v in lanes[1].iter_mut() {
        *v = (*v as f64 * gain) as f32;
    }

    // per-ear rendering and summation
    let mut mix_left = vec![0.0f32; t];
    let mut mix_right = vec![0.0f32; t];
    for (lane, &az) in lanes.iter().zip(&spec.azimuths) {
        let pair = db.get(az)?;
        let l = convolve_truncated(lane, &pair.left, t);
        let r = convolve_truncated(lane, &pair.right, t);
        for i in 0..t {
            mix_left[i] += l[i];
            mix_right[i] += r[i];
        }
    }

    let measured_overlap = isect.map(|(a, b)| (b - a) as f64 / active_len as f64).unwrap_or(0.0);
    let rendered_left = spatialize_ear(&lanes[0], spec.azimuths[0], db, true)?;

    let example = MixtureExample {
        mix_left: AudioClip::new(mix_left, SAMPLE_RATE)?,
        mix_right: AudioClip::new(mix_right, SAMPLE_RATE)?,
        target_reference: AudioClip::new(lanes[0].clone(), SAMPLE_RATE)?,
        target_rendered_left: AudioClip::new(rendered_left, SAMPLE_RATE)?,
        enrollment,
        spec: spec.clone(),
        target_speaker_id: target_speaker.clone(),
        interferer_speaker_ids: vec![interferer_speaker.clone()],
    };
    let ctx = BuildContext {
        debug: MixtureDebug {
            lanes: example_lanes(&lanes),
            gains: vec![1.0, gain],
            intervals: intervals.to_vec(),
            measured_overlap,
        },
        speaker_ids: vec![target_speaker, interferer_speaker],
        interferer_enrollment,
    };
    Ok((example, ctx))
}

fn example_lanes(lanes: &[Vec<f32>]) -> Vec<Vec<f32>> {
    lanes.to_vec()
}

fn swap_roles(
    primary: &MixtureExample,
    ctx: &BuildContext,
    _corpus: &SpeechCorpus,
    db: &HrirDatabase,
) -> Result<MixtureExample> {
    let lane = ctx.debug.lanes[1].clone();
    let azimuths = vec![primary.spec.azimuths[1], primary.spec.azimuths[0]];
    let rendered_left = spatialize_ear(&lane, azimuths[0], db, true)?;
    let spec = MixtureSpec {
        azimuths,
        ..primary.spec.clone()
    };
    Ok(MixtureExample {
        mix_left: primary.mix_left.clone(),
        mix_right: primary.mix_right.clone(),
        target_reference: AudioClip::new(lane, SAMPLE_RATE)?,
        target_rendered_left: AudioClip::new(rendered_left, SAMPLE_RATE)?,
        enrollment: ctx
            .interferer_enrollment
            .clone()
            .ok_or_else(|| Error::Corpus("pair built without interferer enrollment".into()))?,
        spec,
        target_speaker_id: ctx.speaker_ids[1].clone(),
        interferer_speaker_ids: vec![ctx.speaker_ids[0].clone()],
    })
}

fn intersection(a: (usize, usize), b: (usize, usize)) -> Option<(usize, usize)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// Draws a non-silent utterance for `speaker`, excluding the listed indices,
/// fitted to `len` samples. Retries over the remaining utterances before
/// reporting the corpus exhausted.
fn pick_utterance(
    rng: &mut ChaCha8Rng,
    corpus: &SpeechCorpus,
    speaker: &str,
    exclude: &[usize],
    len: usize,
) -> Result<(usize, AudioClip)> {
    let utts = corpus.utterances(speaker)?;
    let mut candidates: Vec<usize> = (0..utts.len()).filter(|i| !exclude.contains(i)).collect();
    if candidates.is_empty() {
        return Err(Error::Corpus(format!(
            "speaker {speaker} has no utterance disjoint from {exclude:?}"
        )));
    }
    candidates.shuffle(rng);
    for ix in candidates {
        let clip = read_wav(&utts[ix])?;
        let fitted = clip.fit_to(len);
        if !fitted.is_silent() {
            return Ok((ix, fitted));
        }
        log::debug!("skipping silent utterance {}", utts[ix].display());
    }
    Err(Error::Corpus(format!(
        "all candidate utterances for speaker {speaker} are silent"
    )))
}
