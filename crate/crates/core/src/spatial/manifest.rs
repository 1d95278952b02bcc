//! Line-delimited dataset manifests: one JSON record per example with paths
//! (relative to the manifest file) and the full synthesis metadata.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio::{read_wav, AudioClip};
use crate::error::{Error, Result};
use crate::spatial::mixture::MixtureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub mix_left: String,
    pub mix_right: String,
    pub target_reference: String,
    pub target_rendered_left: String,
    pub enrollment: String,
    pub spec: MixtureSpec,
    pub target_speaker_id: String,
    pub interferer_speaker_ids: Vec<String>,
}

impl ManifestEntry {
    fn paths(&self) -> [&str; 5] {
        [
            &self.mix_left,
            &self.mix_right,
            &self.target_reference,
            &self.target_rendered_left,
            &self.enrollment,
        ]
    }
}

/// The five audio signals of one example, loaded into memory.
#[derive(Debug, Clone)]
pub struct LoadedExample {
    pub mix_left: AudioClip,
    pub mix_right: AudioClip,
    pub target_reference: AudioClip,
    pub target_rendered_left: AudioClip,
    pub enrollment: AudioClip,
}

pub fn write_manifest(entries: &[ManifestEntry], path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for entry in entries {
        let line = serde_json::to_string(entry)?;
        writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let base = manifest_base(path);
    let mut entries = Vec::new();
    for (ix, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(&line).map_err(|e| Error::ManifestParse {
                path: path.to_path_buf(),
                line: ix + 1,
                message: e.to_string(),
            })?;
        for rel in entry.paths() {
            let p = base.join(rel);
            if !p.exists() {
                return Err(Error::ManifestParse {
                    path: path.to_path_buf(),
                    line: ix + 1,
                    message: format!("referenced audio file missing: {}", p.display()),
                });
            }
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Directory that the manifest's relative paths are resolved against.
pub fn manifest_base(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn load_example(entry: &ManifestEntry, base: &Path) -> Result<LoadedExample> {
    Ok(LoadedExample {
        mix_left: read_wav(&base.join(&entry.mix_left))?,
        mix_right: read_wav(&base.join(&entry.mix_right))?,
        target_reference: read_wav(&base.join(&entry.target_reference))?,
        target_rendered_left: read_wav(&base.join(&entry.target_rendered_left))?,
        enrollment: read_wav(&base.join(&entry.enrollment))?,
    })
}
