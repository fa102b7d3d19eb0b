use crate::imaging::SegmentSet;
use serde::{Deserialize, Serialize};

/// Indices (into the input sets) of segments with no plausible counterpart.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub start_count: usize,
    pub end_count: usize,
    pub start_flagged: Vec<usize>,
    pub end_flagged: Vec<usize>,
    pub removed: bool,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.start_flagged.is_empty() && self.end_flagged.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ConsistencyOutcome {
    pub start: SegmentSet,
    pub end: SegmentSet,
    pub report: ConsistencyReport,
}

/// Checks that start and end segments pair up. Equal counts pass untouched.
/// Otherwise segments are paired greedily by ascending centroid distance and
/// the leftovers of the larger set are flagged. Flagged segments are only
/// dropped when `allow_removal` is set.
pub fn filter_consistent_segments(
    start: &SegmentSet,
    end: &SegmentSet,
    allow_removal: bool,
) -> ConsistencyOutcome {
    let mut report = ConsistencyReport {
        start_count: start.len(),
        end_count: end.len(),
        ..Default::default()
    };
    if start.len() != end.len() {
        let mut pairs = Vec::with_capacity(start.len() * end.len());
        for (i, s) in start.iter().enumerate() {
            for (j, e) in end.iter().enumerate() {
                pairs.push((s.centroid.distance_sq(&e.centroid), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut start_used = vec![false; start.len()];
        let mut end_used = vec![false; end.len()];
        for (_, i, j) in pairs {
            if !start_used[i] && !end_used[j] {
                start_used[i] = true;
                end_used[j] = true;
            }
        }
        report.start_flagged = (0..start.len()).filter(|&i| !start_used[i]).collect();
        report.end_flagged = (0..end.len()).filter(|&j| !end_used[j]).collect();
    }

    let keep = |set: &SegmentSet, flagged: &[usize]| SegmentSet {
        segments: set
            .iter()
            .enumerate()
            .filter(|(i, _)| !allow_removal || !flagged.contains(i))
            .map(|(_, s)| s.clone())
            .collect(),
    };
    report.removed = allow_removal && !report.is_clean();
    ConsistencyOutcome {
        start: keep(start, &report.start_flagged),
        end: keep(end, &report.end_flagged),
        report,
    }
}
