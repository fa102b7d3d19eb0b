//! Ground-truth generation: segment the infrared tattoo images, pair start
//! and end segments, match them across the stereo pair and triangulate.
//!
//! Output is one `gt.json` per sequence (schema version 1).

use crate::dataset::{read_luma, read_mask, DatasetError, Eye, Sequence};
use crate::exec::Execution;
use crate::geometry::{
    backproject, depth_from_disparity, filter_consistent_segments, match_segments_epipolar,
    ConsistencyReport, MatchConfig,
};
use crate::imaging::{extract_segments, morphological_open, threshold_ir, LumaImage, SegmentSet};
use crate::point::{Point2, Point3};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const GT_FILE: &str = "gt.json";
pub const GT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GtError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("cannot read ground truth {path}: {message}")]
    Read { path: String, message: String },
    #[error("ground truth {path} has schema version {found}, expected {GT_SCHEMA_VERSION}")]
    Schema { path: String, found: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GtConfig {
    /// Strict IR threshold on the 8-bit scale.
    pub tau: f32,
    /// Opening element radius; 1 means a 3x3 square.
    pub se_radius: usize,
    pub min_area: usize,
    pub matching: MatchConfig,
    /// Drop segments that fail the start/end consistency check instead of
    /// only flagging them.
    pub allow_removal: bool,
}

impl Default for GtConfig {
    fn default() -> Self {
        Self {
            tau: 25.0,
            se_radius: 1,
            min_area: 10,
            matching: MatchConfig::default(),
            allow_removal: false,
        }
    }
}

/// One labelled point at the start or end of a clip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtPoint {
    pub id: usize,
    /// Left-eye segment centroid, full-resolution pixels.
    pub left: Point2,
    pub area: usize,
    pub right: Option<Point2>,
    pub disparity_px: Option<f64>,
    pub position_mm: Option<Point3>,
    pub ncc: Option<f64>,
    /// Failed the start/end consistency check.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub schema_version: u32,
    pub sequence_id: String,
    pub start: Vec<GtPoint>,
    pub end: Vec<GtPoint>,
    pub consistency: ConsistencyReport,
}

impl GroundTruth {
    pub fn start_points(&self) -> Vec<Point2> {
        self.start.iter().map(|p| p.left).collect()
    }

    pub fn end_points(&self) -> Vec<Point2> {
        self.end.iter().map(|p| p.left).collect()
    }

    /// End points with a stereo match; unmatched ones carry no 3D label.
    pub fn end_points_mm(&self) -> Vec<Point3> {
        self.end.iter().filter_map(|p| p.position_mm).collect()
    }

    pub fn start_points_mm(&self) -> Vec<Option<Point3>> {
        self.start.iter().map(|p| p.position_mm).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read(path: &Path) -> Result<Self, GtError> {
        let err = |message: String| GtError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let gt: GroundTruth = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
        if gt.schema_version != GT_SCHEMA_VERSION {
            return Err(GtError::Schema {
                path: path.display().to_string(),
                found: gt.schema_version,
            });
        }
        Ok(gt)
    }
}

/// Threshold, open, and label an IR image.
pub fn segment_ir(ir: &LumaImage, config: &GtConfig) -> SegmentSet {
    let mask = morphological_open(&threshold_ir(ir, config.tau), config.se_radius);
    extract_segments(&mask, config.min_area)
}

fn label_points(
    left: &SegmentSet,
    flagged: &[usize],
    right: &SegmentSet,
    left_ir: &LumaImage,
    right_ir: &LumaImage,
    sequence: &Sequence,
    config: &GtConfig,
) -> Vec<GtPoint> {
    let calib = &sequence.calibration;
    let matches = match_segments_epipolar(left, right, left_ir, right_ir, calib, &config.matching);
    left.iter()
        .enumerate()
        .map(|(i, seg)| {
            let m = matches.for_left(i);
            let position_mm = m.and_then(|m| {
                let z = depth_from_disparity(calib, m.left.x, m.right.x).ok()?;
                backproject(calib, m.left, z).ok()
            });
            GtPoint {
                id: i,
                left: seg.centroid,
                area: seg.area(),
                right: m.map(|m| m.right),
                disparity_px: m.map(|m| m.disparity),
                position_mm,
                ncc: m.map(|m| m.ncc_score),
                flagged: flagged.contains(&i),
            }
        })
        .collect()
}

/// Runs the full labelling pipeline for one sequence.
pub fn make_ground_truth(sequence: &Sequence, config: &GtConfig) -> Result<GroundTruth, GtError> {
    let start_mask = read_mask(&sequence.start_mask())?;
    let end_mask = read_mask(&sequence.end_mask())?;
    let left_start = extract_segments(&start_mask, config.min_area);
    let left_end = extract_segments(&end_mask, config.min_area);
    let checked = filter_consistent_segments(&left_start, &left_end, config.allow_removal);
    let (start_flags, end_flags) = if checked.report.removed {
        (Vec::new(), Vec::new())
    } else {
        (checked.report.start_flagged.clone(), checked.report.end_flagged.clone())
    };

    let left_start_ir = read_luma(&sequence.start_ir(Eye::Left))?;
    let left_end_ir = read_luma(&sequence.end_ir(Eye::Left))?;
    let right_start_ir = read_luma(&sequence.start_ir(Eye::Right))?;
    let right_end_ir = read_luma(&sequence.end_ir(Eye::Right))?;
    let right_start = segment_ir(&right_start_ir, config);
    let right_end = segment_ir(&right_end_ir, config);

    let start = label_points(
        &checked.start,
        &start_flags,
        &right_start,
        &left_start_ir,
        &right_start_ir,
        sequence,
        config,
    );
    let end = label_points(
        &checked.end,
        &end_flags,
        &right_end,
        &left_end_ir,
        &right_end_ir,
        sequence,
        config,
    );
    Ok(GroundTruth {
        schema_version: GT_SCHEMA_VERSION,
        sequence_id: sequence.sequence_id.clone(),
        start,
        end,
        consistency: checked.report,
    })
}

/// Ground truth for every sequence, written next to each sequence as
/// `gt.json`. Per-sequence failures are returned, not fatal.
pub fn make_ground_truth_all(
    sequences: &[Sequence],
    config: &GtConfig,
    execution: Execution,
    write: bool,
) -> Vec<Result<GroundTruth, GtError>> {
    execution.map(sequences, |seq| {
        let gt = make_ground_truth(seq, config)?;
        if write {
            gt.write(&seq.gt_path()).map_err(|e| GtError::Read {
                path: seq.gt_path().display().to_string(),
                message: e.to_string(),
            })?;
        }
        Ok(gt)
    })
}

/// Reads `gt.json` when present, otherwise derives ground truth in memory.
/// The flag reports whether the file was used.
pub fn load_or_make(sequence: &Sequence, config: &GtConfig) -> Result<(GroundTruth, bool), GtError> {
    let path = sequence.gt_path();
    if path.is_file() {
        Ok((GroundTruth::read(&path)?, true))
    } else {
        Ok((make_ground_truth(sequence, config)?, false))
    }
}
