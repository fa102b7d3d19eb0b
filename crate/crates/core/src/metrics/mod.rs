//! Accuracy at pixel/millimetre thresholds and the latency efficiency score.

mod accuracy;
mod latency;

pub use accuracy::{
    accuracy_report, delta_at_threshold, delta_avg, nearest_distances, AccuracyReport,
    DistanceSample, DistanceValue, MetricPoint, SequenceAccuracy, ThresholdSchedule,
};
pub use latency::{latency_stats, nearest_rank, LatencyStats};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sequence has no end labels")]
    NoEndLabels,
    #[error("no points to score (N = 0)")]
    NoPoints,
    #[error("threshold {0} is not positive")]
    NonPositiveThreshold(f64),
    #[error("thresholds must be positive and strictly increasing: {0:?}")]
    InvalidSchedule(Vec<f64>),
    #[error("no latency samples")]
    NoSamples,
}

/// Fraction rendered as a percentage with two decimals, e.g. `66.67`.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

/// Minimum average accuracy for a run to enter the efficiency ranking.
pub const DEFAULT_EFFICIENCY_GATE: f64 = 0.5;

pub fn efficiency_eligible(average_accuracy: f64, gate: f64) -> bool {
    average_accuracy >= gate
}
