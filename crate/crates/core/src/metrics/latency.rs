use super::MetricsError;
use serde::{Deserialize, Serialize};

/// Per-frame latency distribution, milliseconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub samples: usize,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub p99_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// `(mean + p95 + p99) / 3`.
    pub score_ms: f64,
}

/// Nearest-rank percentile: the value at 1-based rank `ceil(pct/100 * n)`
/// of the sorted samples. Integer arithmetic keeps the rank exact.
pub fn nearest_rank(sorted: &[f64], percent: u32) -> f64 {
    assert!(!sorted.is_empty() && (1..=100).contains(&percent));
    let n = sorted.len();
    let rank = (percent as usize * n).div_ceil(100).max(1);
    sorted[rank - 1]
}

pub fn latency_stats(samples_ms: &[f64]) -> Result<LatencyStats, MetricsError> {
    if samples_ms.is_empty() {
        return Err(MetricsError::NoSamples);
    }
    let mut sorted = samples_ms.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean_ms = samples_ms.iter().sum::<f64>() / samples_ms.len() as f64;
    let p95_ms = nearest_rank(&sorted, 95);
    let p99_ms = nearest_rank(&sorted, 99);
    Ok(LatencyStats {
        samples: samples_ms.len(),
        mean_ms,
        p95_ms,
        p99_ms,
        min_ms: sorted[0],
        max_ms: sorted[sorted.len() - 1],
        score_ms: (mean_ms + p95_ms + p99_ms) / 3.0,
    })
}
