use super::MetricsError;
use crate::point::{Point2, Point3};
use serde::{Deserialize, Serialize};

pub trait MetricPoint {
    fn distance_sq(&self, other: &Self) -> f64;
}

impl MetricPoint for Point2 {
    fn distance_sq(&self, other: &Self) -> f64 {
        Point2::distance_sq(self, other)
    }
}

impl MetricPoint for Point3 {
    fn distance_sq(&self, other: &Self) -> f64 {
        Point3::distance_sq(self, other)
    }
}

/// Strictly increasing positive thresholds `l_1 < … < l_M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ThresholdSchedule(Vec<f64>);

impl ThresholdSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self, MetricsError> {
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        if values.is_empty() || !increasing || !values.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Err(MetricsError::InvalidSchedule(values));
        }
        Ok(Self(values))
    }

    /// `[4, 8, 16, 32, 64]` pixels.
    pub fn default_2d() -> Self {
        Self(vec![4.0, 8.0, 16.0, 32.0, 64.0])
    }

    /// `[2, 4, 8, 16, 32]` millimetres.
    pub fn default_3d() -> Self {
        Self(vec![2.0, 4.0, 8.0, 16.0, 32.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ThresholdSchedule {
    type Error = MetricsError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ThresholdSchedule> for Vec<f64> {
    fn from(s: ThresholdSchedule) -> Self {
        s.0
    }
}

/// Final-frame error of one point. `+inf` marks a point that a failed run
/// never produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSample {
    pub value: f64,
    pub point_id: usize,
    pub sequence_id: String,
}

pub trait DistanceValue {
    fn distance_value(&self) -> f64;
}

impl DistanceValue for f64 {
    fn distance_value(&self) -> f64 {
        *self
    }
}

impl DistanceValue for DistanceSample {
    fn distance_value(&self) -> f64 {
        self.value
    }
}

/// Euclidean distance from every estimate to its nearest ground-truth
/// point. Several estimates may share a nearest point.
pub fn nearest_distances<P: MetricPoint>(estimates: &[P], gt_end: &[P]) -> Result<Vec<f64>, MetricsError> {
    if gt_end.is_empty() {
        return Err(MetricsError::NoEndLabels);
    }
    Ok(estimates
        .iter()
        .map(|e| {
            gt_end
                .iter()
                .map(|g| e.distance_sq(g))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect())
}

fn sorted_values<D: DistanceValue>(distances: &[D]) -> Vec<f64> {
    let mut v: Vec<f64> = distances.iter().map(DistanceValue::distance_value).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn fraction_below(sorted: &[f64], threshold: f64) -> f64 {
    sorted.partition_point(|&d| d < threshold) as f64 / sorted.len() as f64
}

/// Fraction of distances strictly below `threshold`; ties are misses.
pub fn delta_at_threshold<D: DistanceValue>(distances: &[D], threshold: f64) -> Result<f64, MetricsError> {
    if !(threshold > 0.0) {
        return Err(MetricsError::NonPositiveThreshold(threshold));
    }
    if distances.is_empty() {
        return Err(MetricsError::NoPoints);
    }
    Ok(fraction_below(&sorted_values(distances), threshold))
}

/// Per-threshold accuracies and their unweighted mean.
pub fn delta_avg<D: DistanceValue>(
    distances: &[D],
    schedule: &ThresholdSchedule,
) -> Result<(Vec<f64>, f64), MetricsError> {
    if distances.is_empty() {
        return Err(MetricsError::NoPoints);
    }
    let sorted = sorted_values(distances);
    let per: Vec<f64> = schedule.values().iter().map(|&l| fraction_below(&sorted, l)).collect();
    let avg = per.iter().sum::<f64>() / per.len() as f64;
    Ok((per, avg))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceAccuracy {
    pub sequence_id: String,
    pub points: usize,
    pub per_threshold: Vec<f64>,
    pub average: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub thresholds: ThresholdSchedule,
    pub per_threshold: Vec<f64>,
    pub average: f64,
    /// Total points pooled across all sequences.
    pub points: usize,
    /// Diagnostics only; the headline numbers pool every point.
    pub per_sequence: Vec<SequenceAccuracy>,
}

/// Pools every sample into one `N`, and also breaks results down by
/// sequence in first-seen order.
pub fn accuracy_report(
    samples: &[DistanceSample],
    schedule: &ThresholdSchedule,
) -> Result<AccuracyReport, MetricsError> {
    let (per_threshold, average) = delta_avg(samples, schedule)?;
    let mut order: Vec<&str> = Vec::new();
    for s in samples {
        if !order.contains(&s.sequence_id.as_str()) {
            order.push(&s.sequence_id);
        }
    }
    let per_sequence = order
        .into_iter()
        .map(|id| {
            let subset: Vec<f64> = samples
                .iter()
                .filter(|s| s.sequence_id == id)
                .map(|s| s.value)
                .collect();
            let (per, avg) = delta_avg(&subset, schedule).expect("subset is non-empty");
            SequenceAccuracy {
                sequence_id: id.to_owned(),
                points: subset.len(),
                per_threshold: per,
                average: avg,
            }
        })
        .collect();
    Ok(AccuracyReport {
        thresholds: schedule.clone(),
        per_threshold,
        average,
        points: samples.len(),
        per_sequence,
    })
}
