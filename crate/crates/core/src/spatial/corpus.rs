//! Speech corpus handling: a directory with one subdirectory per speaker,
//! WAV utterances inside (nested directories allowed). Also provides a
//! synthetic harmonic-voice corpus so the full pipeline runs without a
//! licensed speech dataset, and the deterministic speaker split.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use walkdir::WalkDir;

use crate::audio::{write_wav_samples, SAMPLE_RATE};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SpeechCorpus {
    root: PathBuf,
    speakers: BTreeMap<String, Vec<PathBuf>>,
}

impl SpeechCorpus {
    /// Scans `root`; each first-level directory is a speaker, every `.wav`
    /// under it (recursively) an utterance. Listings are sorted so corpus
    /// iteration order is deterministic.
    pub fn scan(root: &Path) -> Result<Self> {
        let mut speakers = BTreeMap::new();
        let entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        for dir in dirs {
            let speaker = dir
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Error::Corpus(format!("unreadable directory name in {root:?}")))?
                .to_string();
            let mut utts: Vec<PathBuf> = WalkDir::new(&dir)
                .sort_by_file_name()
                .into_iter()
                .filter_map(|e| e.ok())
                .filter(|e| e.file_type().is_file())
                .map(|e| e.into_path())
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
                .collect();
            utts.sort();
            if !utts.is_empty() {
                speakers.insert(speaker, utts);
            }
        }
        if speakers.len() < 2 {
            return Err(Error::Corpus(format!(
                "corpus at {} has {} speakers; need at least 2",
                root.display(),
                speakers.len()
            )));
        }
        Ok(Self {
            root: root.to_path_buf(),
            speakers,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn speakers(&self) -> Vec<&str> {
        self.speakers.keys().map(|s| s.as_str()).collect()
    }

    pub fn num_speakers(&self) -> usize {
        self.speakers.len()
    }

    pub fn utterances(&self, speaker: &str) -> Result<&[PathBuf]> {
        self.speakers
            .get(speaker)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Corpus(format!("unknown speaker {speaker}")))
    }

    /// Restricts the corpus to the given speakers (used for split-scoped
    /// synthesis).
    pub fn restricted_to(&self, keep: &[String]) -> Result<SpeechCorpus> {
        let speakers: BTreeMap<String, Vec<PathBuf>> = self
            .speakers
            .iter()
            .filter(|(k, _)| keep.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        if speakers.len() < 2 {
            return Err(Error::Corpus(format!(
                "split keeps {} speakers; need at least 2",
                speakers.len()
            )));
        }
        Ok(SpeechCorpus {
            root: self.root.clone(),
            speakers,
        })
    }
}

/// Dataset split names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(Error::Parameter(format!(
                "unknown split {other:?} (expected train|valid|test)"
            ))),
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Valid => write!(f, "valid"),
            Split::Test => write!(f, "test"),
        }
    }
}

// The speaker partition is a property of the corpus alone so that synthesis
// runs with different --seed values still agree on it.
const SPLIT_SEED: u64 = 0xB1A7_5EED;

/// Deterministic disjoint 80/10/10 speaker partition.
pub fn split_speakers(corpus: &SpeechCorpus) -> BTreeMap<Split, Vec<String>> {
    let mut names: Vec<String> = corpus.speakers().iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    names.shuffle(&mut rng);
    let n = names.len();
    // every split gets at least 2 speakers when the corpus allows it
    let n_valid = (n / 10).max(2).min(n.saturating_sub(4) / 2 + 2).min(n / 3);
    let n_test = n_valid;
    let n_train = n - n_valid - n_test;
    let mut out = BTreeMap::new();
    let mut train: Vec<String> = names[..n_train].to_vec();
    let mut valid: Vec<String> = names[n_train..n_train + n_valid].to_vec();
    let mut test: Vec<String> = names[n_train + n_valid..].to_vec();
    train.sort();
    valid.sort();
    test.sort();
    out.insert(Split::Train, train);
    out.insert(Split::Valid, valid);
    out.insert(Split::Test, test);
    out
}

/// Parameters for the synthetic harmonic-voice corpus.
#[derive(Debug, Clone)]
pub struct SynthCorpusSpec {
    pub num_speakers: usize,
    pub utterances_per_speaker: usize,
    pub utterance_duration_s: f64,
    pub seed: u64,
}

/// Writes a synthetic corpus: each "speaker" is a distinct fundamental
/// frequency with speaker-specific harmonic weights; utterances differ in
/// phrasing (amplitude envelope and vibrato). Purely a desk-scale stand-in
/// for a real speech corpus.
pub fn synth_speech_corpus(dir: &Path, spec: &SynthCorpusSpec) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = (spec.utterance_duration_s * SAMPLE_RATE as f64) as usize;
    for s in 0..spec.num_speakers {
        let speaker_dir = dir.join(format!("spk{s:03}"));
        std::fs::create_dir_all(&speaker_dir).map_err(|e| Error::io(&speaker_dir, e))?;
        let f0 = 110.0 + 37.0 * s as f64 + rng.random_range(-5.0..5.0);
        let weights: Vec<f64> = (0..6).map(|_| rng.random_range(0.2..1.0)).collect();
        for u in 0..spec.utterances_per_speaker {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let env_rate = rng.random_range(1.5..4.0);
            let vibrato = rng.random_range(2.0..6.0);
            let samples: Vec<f32> = (0..n)
                .map(|t| {
                    let time = t as f64 / SAMPLE_RATE as f64;
                    let env = 0.55 + 0.45 * (std::f64::consts::TAU * env_rate * time).sin();
                    let f = f0 * (1.0 + 0.01 * (std::f64::consts::TAU * vibrato * time).sin());
                    let mut v = 0.0f64;
                    for (h, w) in weights.iter().enumerate() {
                        v += w * (std::f64::consts::TAU * f * (h + 1) as f64 * time + phase).sin();
                    }
                    (0.25 * env * v / weights.len() as f64) as f32
                })
                .collect();
            let path = speaker_dir.join(format!("utt{u:03}.wav"));
            write_wav_samples(&path, &samples, SAMPLE_RATE)?;
        }
    }
    Ok(())
}
