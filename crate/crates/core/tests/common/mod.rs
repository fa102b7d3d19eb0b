#![allow(dead_code)]

use std::path::Path;
use tempfile::TempDir;
use trackeval::dataset::{load_dataset, Dataset, LoaderConfig};
use trackeval::synth::{generate_dataset, Motion, SequenceManifest, SynthConfig, SynthManifest};

pub fn config(sequences: usize, frames: usize, motion: Motion) -> SynthConfig {
    SynthConfig {
        num_sequences: sequences,
        frames_per_sequence: frames,
        image_width: 640,
        image_height: 512,
        motion,
        seed: 7,
        ..SynthConfig::default()
    }
}

pub struct Fixture {
    pub dir: TempDir,
    pub manifest: SynthManifest,
    pub dataset: Dataset,
}

impl Fixture {
    pub fn root(&self) -> &Path {
        self.dir.path()
    }

    /// Manifest entry for a loaded sequence id.
    pub fn entry(&self, sequence_id: &str) -> &SequenceManifest {
        self.manifest
            .sequences
            .iter()
            .find(|s| s.sequence_id == sequence_id)
            .expect("sequence in manifest")
    }
}

pub fn fixture(cfg: &SynthConfig) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_dataset(cfg, dir.path()).unwrap();
    let dataset = load_dataset(dir.path(), &LoaderConfig::default()).unwrap();
    Fixture { dir, manifest, dataset }
}
