//! Stereo geometry: depth from principal-point-adjusted disparity, pinhole
//! lifting, and segment correspondence across the stereo pair.
//!
//! Calibration lengths are metres; every 3D point that leaves this module is
//! in millimetres.

mod consistency;
mod matching;

pub use consistency::{filter_consistent_segments, ConsistencyOutcome, ConsistencyReport};
pub use matching::{match_segments_epipolar, MatchConfig, MatchResult, StereoCorrespondence};

use crate::dataset::CameraCalibration;
use crate::point::{Point2, Point3};
use thiserror::Error;

pub const MM_PER_M: f64 = 1000.0;

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("behind-camera / degenerate disparity: adjusted disparity {0} px is not positive")]
    DegenerateDisparity(f64),
    #[error("non-positive depth {0} m")]
    NonPositiveDepth(f64),
}

/// `(x - c_x) - (x' - c'_x)` in pixels.
pub fn adjusted_disparity(calib: &CameraCalibration, x: f64, x_prime: f64) -> f64 {
    (x - calib.left.cx) - (x_prime - calib.right.cx)
}

/// Depth in metres, `z = b·f / ((x - c_x) - (x' - c'_x))`.
pub fn depth_from_disparity(
    calib: &CameraCalibration,
    x: f64,
    x_prime: f64,
) -> Result<f64, GeometryError> {
    let d = adjusted_disparity(calib, x, x_prime);
    if !(d > 0.0) {
        return Err(GeometryError::DegenerateDisparity(d));
    }
    Ok(calib.baseline_m * calib.focal() / d)
}

/// Lifts a left-image pixel at depth `z_m` (metres) to millimetres in the
/// left camera frame.
pub fn backproject(calib: &CameraCalibration, p: Point2, z_m: f64) -> Result<Point3, GeometryError> {
    if !(z_m > 0.0) {
        return Err(GeometryError::NonPositiveDepth(z_m));
    }
    let k = &calib.left;
    Ok(Point3::new(
        (p.x - k.cx) * z_m / k.fx * MM_PER_M,
        (p.y - k.cy) * z_m / k.fy * MM_PER_M,
        z_m * MM_PER_M,
    ))
}

/// Projects a millimetre point into the left image.
pub fn project_left(calib: &CameraCalibration, p: Point3) -> Point2 {
    let k = &calib.left;
    Point2::new(k.cx + k.fx * p.x / p.z, k.cy + k.fy * p.y / p.z)
}

/// Projects a millimetre point into the right image of a rectified pair whose
/// right camera sits `baseline_m` along +x.
pub fn project_right(calib: &CameraCalibration, p: Point3) -> Point2 {
    let k = &calib.right;
    let b_mm = calib.baseline_m * MM_PER_M;
    Point2::new(k.cx + k.fx * (p.x - b_mm) / p.z, k.cy + k.fy * p.y / p.z)
}

/// Depth then backprojection for a left/right x pair.
pub fn triangulate(calib: &CameraCalibration, left: Point2, x_prime: f64) -> Result<Point3, GeometryError> {
    let z = depth_from_disparity(calib, left.x, x_prime)?;
    backproject(calib, left, z)
}
