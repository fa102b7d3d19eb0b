use super::adjusted_disparity;
use crate::dataset::CameraCalibration;
use crate::imaging::{ncc, LumaImage, Patch, SegmentSet};
use crate::point::Point2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Allowed vertical offset between left and right centroids, pixels.
    pub band_px: f64,
    /// Odd patch side used for correlation.
    pub patch_px: usize,
    pub ncc_min: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            band_px: 3.0,
            patch_px: 21,
            ncc_min: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StereoCorrespondence {
    pub left_index: usize,
    pub right_index: usize,
    pub left: Point2,
    pub right: Point2,
    pub ncc_score: f64,
    /// Principal-point-adjusted disparity, always positive.
    pub disparity: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchResult {
    /// Sorted by `left_index`.
    pub correspondences: Vec<StereoCorrespondence>,
    pub unmatched_left: Vec<usize>,
}

impl MatchResult {
    pub fn for_left(&self, left_index: usize) -> Option<&StereoCorrespondence> {
        self.correspondences
            .binary_search_by_key(&left_index, |c| c.left_index)
            .ok()
            .map(|i| &self.correspondences[i])
    }
}

/// For each left segment, scores every right segment inside the epipolar
/// band with positive adjusted disparity, then assigns pairs greedily by
/// descending NCC so that each right segment is used at most once.
pub fn match_segments_epipolar(
    left: &SegmentSet,
    right: &SegmentSet,
    left_ir: &LumaImage,
    right_ir: &LumaImage,
    calib: &CameraCalibration,
    config: &MatchConfig,
) -> MatchResult {
    let right_patches: Vec<Patch> = right
        .iter()
        .map(|s| Patch::sample(right_ir, s.centroid, config.patch_px))
        .collect();

    let mut candidates = Vec::new();
    for (li, ls) in left.iter().enumerate() {
        let lp = ls.centroid;
        let left_patch = Patch::sample(left_ir, lp, config.patch_px);
        for (ri, rs) in right.iter().enumerate() {
            let rp = rs.centroid;
            if (rp.y - lp.y).abs() > config.band_px {
                continue;
            }
            let disparity = adjusted_disparity(calib, lp.x, rp.x);
            if !(disparity > 0.0) {
                continue;
            }
            let Ok(score) = ncc(&left_patch, &right_patches[ri]) else {
                continue;
            };
            if score >= config.ncc_min {
                candidates.push(StereoCorrespondence {
                    left_index: li,
                    right_index: ri,
                    left: lp,
                    right: rp,
                    ncc_score: score,
                    disparity,
                });
            }
        }
    }

    candidates.sort_by(|a, b| {
        b.ncc_score
            .total_cmp(&a.ncc_score)
            .then(a.left_index.cmp(&b.left_index))
            .then(a.right_index.cmp(&b.right_index))
    });
    let mut left_used = vec![false; left.len()];
    let mut right_used = vec![false; right.len()];
    let mut correspondences = Vec::new();
    for c in candidates {
        if left_used[c.left_index] || right_used[c.right_index] {
            continue;
        }
        left_used[c.left_index] = true;
        right_used[c.right_index] = true;
        correspondences.push(c);
    }
    correspondences.sort_by_key(|c| c.left_index);
    let unmatched_left = (0..left.len()).filter(|&i| !left_used[i]).collect();
    MatchResult {
        correspondences,
        unmatched_left,
    }
}
