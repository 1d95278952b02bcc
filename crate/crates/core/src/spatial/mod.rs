//! Spatial synthesis: HRIR databases, binaural rendering, mixture
//! generation, corpora, and dataset manifests.

pub mod corpus;
pub mod dataset;
pub mod hrir;
pub mod manifest;
pub mod mixture;
pub mod render;

pub use corpus::{split_speakers, synth_speech_corpus, SpeechCorpus, Split, SynthCorpusSpec};
pub use dataset::{synth_dataset, SynthOptions};
pub use hrir::{
    azimuth_grid, load_hrir_db, load_hrir_db_with_map, synth_spherical_hrir, woodworth_itd_s,
    HrirDatabase, HrirNameMap, HrirNameMapEntry, HrirPair, HrirSummary,
};
pub use manifest::{
    load_example, manifest_base, read_manifest, write_manifest, LoadedExample, ManifestEntry,
};
pub use mixture::{
    make_mixture, make_mixture_debug, make_mixture_pair, MixtureDebug, MixtureExample, MixtureSpec,
};
pub use render::spatialize;
