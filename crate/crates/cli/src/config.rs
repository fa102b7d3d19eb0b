use serde::Deserialize;
use std::path::{Path, PathBuf};
use trackeval::groundtruth::GtConfig;
use trackeval::trackers::TrackerParams;

/// Optional settings read from `--config`. Anything unset falls back to the
/// built-in default; flags and environment variables override it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tracker: Option<String>,
    pub mode: Option<String>,
    pub thresholds: Option<Vec<f64>>,
    pub latency: Option<bool>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub efficiency_gate: Option<f64>,
    /// Skip the embedded control run.
    pub no_control: Option<bool>,
    #[serde(default)]
    pub trackers: TrackerParams,
    #[serde(default)]
    pub gt: GtConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

pub fn parse_thresholds(list: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("invalid threshold {s:?}")))
        .collect()
}
