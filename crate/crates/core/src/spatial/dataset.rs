//! Dataset-level synthesis: samples per-example spatial parameters from the
//! protocol distributions (uniform grid azimuths, overlap U(0,1), relative
//! SNR U(0,5) dB), renders each mixture, and writes WAVs plus a manifest.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::audio::write_wav;
use crate::error::{Error, Result};
use crate::spatial::corpus::{split_speakers, SpeechCorpus, Split};
use crate::spatial::hrir::HrirDatabase;
use crate::spatial::manifest::{write_manifest, ManifestEntry};
use crate::spatial::mixture::{make_mixture, make_mixture_pair, MixtureExample, MixtureSpec};

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub count: usize,
    pub seed: u64,
    /// When set, only that split's speakers are used (disjoint across splits).
    pub split: Option<Split>,
    pub duration_s: f64,
    pub enrollment_duration_s: f64,
    /// Relative-SNR range in dB, sampled uniformly.
    pub snr_range_db: (f64, f64),
    /// Emit role-swapped example pairs (forces relative SNR 0); `count` then
    /// counts emitted examples and must be even.
    pub paired: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            count: 8,
            seed: 0,
            split: None,
            duration_s: 4.0,
            enrollment_duration_s: 8.0,
            snr_range_db: (0.0, 5.0),
            paired: false,
        }
    }
}

/// Samples one example's mixture spec from the protocol distributions.
fn sample_spec(
    rng: &mut ChaCha8Rng,
    db: &HrirDatabase,
    opts: &SynthOptions,
) -> MixtureSpec {
    let grid = db.azimuths();
    let target_az = *grid.choose(rng).expect("non-empty grid");
    let interferer_az = loop {
        let az = *grid.choose(rng).expect("non-empty grid");
        if az != target_az || grid.len() == 1 {
            break az;
        }
    };
    let overlap_ratio = rng.random_range(0.0..=1.0);
    let relative_snr_db = if opts.paired {
        0.0
    } else {
        rng.random_range(opts.snr_range_db.0..=opts.snr_range_db.1)
    };
    MixtureSpec {
        num_sources: 2,
        duration_s: opts.duration_s,
        overlap_ratio,
        relative_snr_db,
        azimuths: vec![target_az, interferer_az],
        enrollment_duration_s: opts.enrollment_duration_s,
        rng_seed: rng.random(),
    }
}

/// Synthesizes `opts.count` examples into `out_dir` and writes
/// `manifest.jsonl` there. Returns the manifest entries.
pub fn synth_dataset(
    corpus: &SpeechCorpus,
    db: &HrirDatabase,
    out_dir: &Path,
    opts: &SynthOptions,
) -> Result<Vec<ManifestEntry>> {
    if opts.paired && opts.count % 2 != 0 {
        return Err(Error::Parameter(
            "paired synthesis needs an even example count".into(),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let scoped = match opts.split {
        Some(split) => {
            let splits = split_speakers(corpus);
            corpus.restricted_to(&splits[&split])?
        }
        None => corpus.clone(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut entries = Vec::with_capacity(opts.count);
    let mut emitted = 0usize;
    while emitted < opts.count {
        let spec = sample_spec(&mut rng, db, opts);
        if opts.paired {
            let (a, b) = make_mixture_pair(&spec, &scoped, db)?;
            entries.push(persist(out_dir, emitted, &a)?);
            entries.push(persist(out_dir, emitted + 1, &b)?);
            emitted += 2;
        } else {
            let ex = make_mixture(&spec, &scoped, db)?;
            entries.push(persist(out_dir, emitted, &ex)?);
            emitted += 1;
        }
    }
    write_manifest(&entries, &out_dir.join("manifest.jsonl"))?;
    Ok(entries)
}

fn persist(out_dir: &Path, index: usize, ex: &MixtureExample) -> Result<ManifestEntry> {
    let name = |suffix: &str| format!("ex{index:05}_{suffix}.wav");
    let entry = ManifestEntry {
        mix_left: name("mixl"),
        mix_right: name("mixr"),
        target_reference: name("ref"),
        target_rendered_left: name("refl"),
        enrollment: name("enroll"),
        spec: ex.spec.clone(),
        target_speaker_id: ex.target_speaker_id.clone(),
        interferer_speaker_ids: ex.interferer_speaker_ids.clone(),
    };
    write_wav(&out_dir.join(&entry.mix_left), &ex.mix_left)?;
    write_wav(&out_dir.join(&entry.mix_right), &ex.mix_right)?;
    write_wav(&out_dir.join(&entry.target_reference), &ex.target_reference)?;
    write_wav(
        &out_dir.join(&entry.target_rendered_left),
        &ex.target_rendered_left,
    )?;
    write_wav(&out_dir.join(&entry.enrollment), &ex.enrollment)?;
    Ok(entry)
}
