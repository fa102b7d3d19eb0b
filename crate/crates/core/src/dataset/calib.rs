use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const NOMINAL_WIDTH: u32 = 1280;
pub const NOMINAL_HEIGHT: u32 = 1024;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot read calibration {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed calibration {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid calibration {path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinholeIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// Stereo calibration of one sequence. Internal lengths are metres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraCalibration {
    pub left: PinholeIntrinsics,
    pub right: PinholeIntrinsics,
    pub baseline_m: f64,
    /// Right-camera rotation relative to the left, axis-angle radians.
    pub rotation_axis_angle: [f64; 3],
    /// Right-camera translation relative to the left, metres.
    pub translation_m: [f64; 3],
    pub image_width: u32,
    pub image_height: u32,
}

// On-disk form. Baseline may be omitted when a translation is given.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationDoc {
    #[serde(default)]
    #[allow(dead_code)]
    schema_version: Option<u32>,
    left: PinholeIntrinsics,
    right: PinholeIntrinsics,
    #[serde(default)]
    baseline_m: Option<f64>,
    #[serde(default)]
    rotation_axis_angle: [f64; 3],
    #[serde(default)]
    translation_m: Option<[f64; 3]>,
    #[serde(default)]
    image_size: Option<[u32; 2]>,
}

#[derive(Serialize)]
struct CalibrationOut<'a> {
    schema_version: u32,
    left: &'a PinholeIntrinsics,
    right: &'a PinholeIntrinsics,
    baseline_m: f64,
    rotation_axis_angle: [f64; 3],
    translation_m: [f64; 3],
    image_size: [u32; 2],
}

impl CameraCalibration {
    /// Rectified pair with shared focal length and the right camera displaced
    /// by `baseline_m` along +x.
    pub fn rectified(
        focal_px: f64,
        left_principal: (f64, f64),
        right_principal: (f64, f64),
        baseline_m: f64,
    ) -> Self {
        let intr = |(cx, cy): (f64, f64)| PinholeIntrinsics {
            fx: focal_px,
            fy: focal_px,
            cx,
            cy,
        };
        Self {
            left: intr(left_principal),
            right: intr(right_principal),
            baseline_m,
            rotation_axis_angle: [0.0; 3],
            translation_m: [-baseline_m, 0.0, 0.0],
            image_width: NOMINAL_WIDTH,
            image_height: NOMINAL_HEIGHT,
        }
    }

    pub fn with_image_size(mut self, width: u32, height: u32) -> Self {
        self.image_width = width;
        self.image_height = height;
        self
    }

    /// Focal length used by the depth equation (left horizontal focal).
    pub fn focal(&self) -> f64 {
        self.left.fx
    }

    pub fn validate(&self) -> Result<(), String> {
        for (eye, k) in [("left", &self.left), ("right", &self.right)] {
            if !(k.fx > 0.0 && k.fy > 0.0) {
                return Err(format!("non-positive {eye} focal length"));
            }
            let inside = k.cx >= 0.0
                && k.cy >= 0.0
                && k.cx < f64::from(self.image_width)
                && k.cy < f64::from(self.image_height);
            if !inside {
                return Err(format!(
                    "{eye} principal point ({}, {}) outside the {}x{} frame",
                    k.cx, k.cy, self.image_width, self.image_height
                ));
            }
        }
        if !(self.baseline_m > 0.0) {
            return Err("non-positive baseline".into());
        }
        if self.rotation_axis_angle.iter().chain(&self.translation_m).any(|v| !v.is_finite()) {
            return Err("non-finite stereo pose".into());
        }
        Ok(())
    }

    pub fn is_nominal_size(&self) -> bool {
        self.image_width == NOMINAL_WIDTH && self.image_height == NOMINAL_HEIGHT
    }

    pub fn to_json(&self) -> String {
        let out = CalibrationOut {
            schema_version: 1,
            left: &self.left,
            right: &self.right,
            baseline_m: self.baseline_m,
            rotation_axis_angle: self.rotation_axis_angle,
            translation_m: self.translation_m,
            image_size: [self.image_width, self.image_height],
        };
        serde_json::to_string_pretty(&out).expect("calibration serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

pub fn load_calibration(path: &Path) -> Result<CameraCalibration, CalibrationError> {
    let text = std::fs::read_to_string(path).map_err(|source| CalibrationError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_calibration(&text, path)
}

pub(crate) fn parse_calibration(text: &str, path: &Path) -> Result<CameraCalibration, CalibrationError> {
    let doc: CalibrationDoc = serde_json::from_str(text).map_err(|source| CalibrationError::Parse {
        path: path.to_owned(),
        source,
    })?;
    let invalid = |reason: String| CalibrationError::Invalid {
        path: path.to_owned(),
        reason,
    };
    let translation = doc.translation_m;
    let baseline_m = match (doc.baseline_m, translation) {
        (Some(b), _) => b,
        (None, Some(t)) => (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt(),
        (None, None) => return Err(invalid("missing field `baseline_m` (or `translation_m`)".into())),
    };
    let [image_width, image_height] = doc.image_size.unwrap_or([NOMINAL_WIDTH, NOMINAL_HEIGHT]);
    let calib = CameraCalibration {
        left: doc.left,
        right: doc.right,
        baseline_m,
        rotation_axis_angle: doc.rotation_axis_angle,
        translation_m: translation.unwrap_or([-baseline_m, 0.0, 0.0]),
        image_width,
        image_height,
    };
    calib.validate().map_err(invalid)?;
    Ok(calib)
}
