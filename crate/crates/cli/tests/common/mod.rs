#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;
use trackeval::dataset::{load_dataset, Dataset, LoaderConfig};
use trackeval::synth::{generate_dataset, Motion, SynthConfig, SynthManifest};

pub const BIN: &str = env!("CARGO_BIN_EXE_trackeval");

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
}

pub fn fixture(cfg: &SynthConfig) -> Fixture {
    let dir = tempfile::tempdir().expect("tempdir");
    let manifest = generate_dataset(cfg, dir.path()).expect("synthetic dataset");
    let dataset = load_dataset(dir.path(), &LoaderConfig::default()).expect("load fixture");
    Fixture { dir, manifest, dataset }
}

/// Runs the binary with a clean `TRACKEVAL_*` environment.
pub fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("TRACKEVAL_") {
            cmd.env_remove(k);
        }
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn trackeval")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
