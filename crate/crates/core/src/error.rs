use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error class used by the CLI to pick an exit code: validation
/// failures (bad inputs, contract violations) exit 3, runtime failures exit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Runtime,
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("audio format error: {0}")]
    AudioFormat(String),

    #[error("wav read error at {path}: {source}")]
    WavRead {
        path: PathBuf,
        source: hound::Error,
    },

    #[error("wav write error at {path}: {source}")]
    WavWrite {
        path: PathBuf,
        source: hound::Error,
    },

    #[error("HRIR coverage error: missing azimuths {missing:?} (expected {expected} entries at {resolution_deg}° resolution)")]
    HrirCoverage {
        missing: Vec<i32>,
        expected: usize,
        resolution_deg: i32,
    },

    #[error("HRIR format error: {0}")]
    HrirFormat(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("azimuth {azimuth_deg}° not on the HRIR grid (resolution {resolution_deg}°)")]
    AzimuthLookup {
        azimuth_deg: i32,
        resolution_deg: i32,
    },

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("manifest parse error at {path}:{line}: {message}")]
    ManifestParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("shape contract violated: {0}")]
    Contract(String),

    #[error("input too short: signal length {len} < frame length {frame_len}")]
    InputTooShort { len: usize, frame_len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("training diverged at step {step}: {message}")]
    Diverged { step: usize, message: String },

    #[error("external metric `{name}` failed: {message}")]
    ExternalMetric { name: String, message: String },

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Candle(#[from] candle_core::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Classifies the error for CLI exit-code mapping.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::AudioFormat(_)
            | Error::HrirCoverage { .. }
            | Error::HrirFormat(_)
            | Error::Parameter(_)
            | Error::AzimuthLookup { .. }
            | Error::Contract(_)
            | Error::InputTooShort { .. }
            | Error::Domain(_)
            | Error::Config(_)
            | Error::ManifestParse { .. } => ErrorClass::Validation,
            _ => ErrorClass::Runtime,
        }
    }
}
