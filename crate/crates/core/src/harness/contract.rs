use crate::dataset::CameraCalibration;
use crate::imaging::LumaImage;
use crate::point::{Point2, Point3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::TwoD => "2d",
            Mode::ThreeD => "3d",
        }
    }
}

/// Everything a tracker is given before the first step. The images are the
/// first frame of the clip.
pub struct TrackerInit<'a> {
    pub start_points: &'a [Point2],
    pub left: &'a LumaImage,
    pub right: Option<&'a LumaImage>,
    pub calibration: Option<&'a CameraCalibration>,
    pub mode: Mode,
}

/// The frame most recently yielded by the stream. Nothing later is
/// reachable from here.
pub struct StereoFrame<'a> {
    pub index: usize,
    pub left: &'a LumaImage,
    pub right: Option<&'a LumaImage>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Estimates {
    Points2(Vec<Point2>),
    /// Millimetres, left camera frame.
    Points3(Vec<Point3>),
}

impl Estimates {
    pub fn len(&self) -> usize {
        match self {
            Estimates::Points2(p) => p.len(),
            Estimates::Points3(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            Estimates::Points2(_) => Mode::TwoD,
            Estimates::Points3(_) => Mode::ThreeD,
        }
    }

    pub fn all_finite(&self) -> bool {
        match self {
            Estimates::Points2(p) => p.iter().all(Point2::is_finite),
            Estimates::Points3(p) => p.iter().all(Point3::is_finite),
        }
    }

    /// Flattened coordinates per point (`[x, y]` or `[x, y, z]`).
    pub fn coords(&self) -> Vec<Vec<f64>> {
        match self {
            Estimates::Points2(p) => p.iter().map(|q| vec![q.x, q.y]).collect(),
            Estimates::Points3(p) => p.iter().map(|q| vec![q.x, q.y, q.z]).collect(),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TrackerError {
    #[error("tracker needs {0}, which the harness did not provide")]
    MissingInput(&'static str),
    #[error("{0}")]
    Failed(String),
}

/// Streaming point tracker. `init` sees the first frame; `step` is then
/// called once per frame in order, including frame 0, and must return one
/// estimate per start point.
pub trait Tracker: Send {
    fn name(&self) -> &str;
    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError>;
    fn step(&mut self, frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError>;
}
