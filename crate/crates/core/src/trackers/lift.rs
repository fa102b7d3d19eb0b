use crate::dataset::CameraCalibration;
use crate::exec::Execution;
use crate::geometry::{adjusted_disparity, backproject, depth_from_disparity, MatchConfig};
use crate::harness::{Estimates, Mode, StereoFrame, Tracker, TrackerError, TrackerInit};
use crate::imaging::{LumaImage, Patch, PreparedTemplate};
use crate::point::{Point2, Point3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LiftConfig {
    pub matching: MatchConfig,
    /// Largest adjusted disparity searched, pixels.
    pub max_disparity_px: usize,
    /// Depth used for a point that has never produced a valid match.
    pub fallback_depth_m: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            matching: MatchConfig::default(),
            max_disparity_px: 256,
            fallback_depth_m: 0.05,
            execution: Execution::default(),
        }
    }
}

/// How a 2D tracker becomes a 3D one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftStrategy {
    /// Track in the left eye, search the right eye along the epipolar band.
    #[default]
    Epipolar,
    /// Track independently in each eye and triangulate the two tracks.
    BothEyes,
}

/// How a lifted point got its depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftFlag {
    Matched,
    /// No acceptable match this frame; last valid depth reused.
    Carried,
    /// The best match had non-positive adjusted disparity.
    Degenerate,
    /// No valid depth has ever been seen for this point.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RightMatch {
    pub right: Point2,
    /// Principal-point-adjusted disparity after subpixel refinement.
    pub disparity: f64,
    pub ncc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedPoint {
    pub position_mm: Point3,
    pub flag: LiftFlag,
    pub disparity: Option<f64>,
}

fn parabola_peak(left: f64, centre: f64, right: f64) -> f64 {
    let denom = left - 2.0 * centre + right;
    if denom < 0.0 {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

/// Searches the right image along the epipolar band for the patch around
/// `p`, over adjusted disparities `0..=max_disparity_px`.
pub fn find_right_match(
    left: &LumaImage,
    right: &LumaImage,
    calib: &CameraCalibration,
    p: Point2,
    config: &LiftConfig,
) -> Option<RightMatch> {
    let side = config.matching.patch_px;
    let half = (side / 2) as f64;
    let template = PreparedTemplate::new(&Patch::sample(left, p, side)).ok()?;
    let band = config.matching.band_px.floor().max(0.0) as usize;
    let max_d = config.matching_range(p, calib);

    // Right-image x at zero adjusted disparity.
    let base_x = p.x - calib.left.cx + calib.right.cx;
    let cols = max_d + side;
    let rows = 2 * band + side;
    let x_origin = base_x - max_d as f64 - half;
    let y_origin = p.y - band as f64 - half;
    let mut region = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            region.push(right.sample(x_origin + i as f64, y_origin + j as f64));
        }
    }

    // Window top-left column `i` is disparity `max_d - i`; row `j` is offset `j - band`.
    let n_rows = 2 * band + 1;
    let n_cols = max_d + 1;
    let mut scores = vec![None; n_rows * n_cols];
    let mut best: Option<(f64, usize, usize)> = None;
    for j in 0..n_rows {
        for i in 0..n_cols {
            let cx = base_x - (max_d - i) as f64;
            let cy = p.y + j as f64 - band as f64;
            if !right.contains(cx, cy) {
                continue;
            }
            let Some(s) = template.score(&region, cols, i, j) else {
                continue;
            };
            scores[j * n_cols + i] = Some(s);
            if best.is_none_or(|(b, _, _)| s > b) {
                best = Some((s, i, j));
            }
        }
    }
    let (score, i, j) = best?;
    if score < config.matching.ncc_min {
        return None;
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    if score < 1.0 - 1e-9 {
        let at = |i: isize, j: isize| -> Option<f64> {
            if i < 0 || j < 0 || i as usize >= n_cols || j as usize >= n_rows {
                return None;
            }
            scores[j as usize * n_cols + i as usize]
        };
        let (ii, jj) = (i as isize, j as isize);
        if let (Some(a), Some(c)) = (at(ii - 1, jj), at(ii + 1, jj)) {
            sx = parabola_peak(a, score, c);
        }
        if let (Some(a), Some(c)) = (at(ii, jj - 1), at(ii, jj + 1)) {
            sy = parabola_peak(a, score, c);
        }
    }
    let right_pt = Point2::new(
        base_x - (max_d - i) as f64 + sx,
        p.y + j as f64 - band as f64 + sy,
    );
    Some(RightMatch {
        right: right_pt,
        disparity: adjusted_disparity(calib, p.x, right_pt.x),
        ncc: score,
    })
}

impl LiftConfig {
    // Disparity range clipped so the search never starts left of the image.
    fn matching_range(&self, p: Point2, calib: &CameraCalibration) -> usize {
        let base_x = p.x - calib.left.cx + calib.right.cx;
        let room = base_x.floor().max(0.0) as usize;
        self.max_disparity_px.min(room)
    }
}

/// Per-point depth state that turns left-image positions into millimetres.
#[derive(Clone, Debug)]
pub struct StereoLifter {
    config: LiftConfig,
    last_depth: Vec<Option<f64>>,
    flags: Vec<LiftFlag>,
}

impl StereoLifter {
    pub fn new(config: LiftConfig, points: usize) -> Self {
        Self {
            config,
            last_depth: vec![None; points],
            flags: vec![LiftFlag::Fallback; points],
        }
    }

    pub fn flags(&self) -> &[LiftFlag] {
        &self.flags
    }

    fn resolve(
        &mut self,
        calib: &CameraCalibration,
        index: usize,
        p: Point2,
        x_prime: Option<f64>,
    ) -> LiftedPoint {
        let disparity = x_prime.map(|xp| adjusted_disparity(calib, p.x, xp));
        let (depth, flag) = match x_prime.map(|xp| depth_from_disparity(calib, p.x, xp)) {
            Some(Ok(z)) => {
                self.last_depth[index] = Some(z);
                (z, LiftFlag::Matched)
            }
            Some(Err(_)) => (
                self.last_depth[index].unwrap_or(self.config.fallback_depth_m),
                LiftFlag::Degenerate,
            ),
            None => match self.last_depth[index] {
                Some(z) => (z, LiftFlag::Carried),
                None => (self.config.fallback_depth_m, LiftFlag::Fallback),
            },
        };
        self.flags[index] = flag;
        let position_mm = backproject(calib, p, depth).expect("depths kept positive");
        LiftedPoint {
            position_mm,
            flag,
            disparity,
        }
    }

    /// Lifts left-image points by searching the right image for each.
    pub fn lift(
        &mut self,
        calib: &CameraCalibration,
        left: &LumaImage,
        right: &LumaImage,
        points: &[Point2],
    ) -> Vec<LiftedPoint> {
        let config = &self.config;
        let matches = config
            .execution
            .map(points, |&p| find_right_match(left, right, calib, p, config));
        points
            .iter()
            .zip(matches)
            .enumerate()
            .map(|(i, (&p, m))| self.resolve(calib, i, p, m.map(|m| m.right.x)))
            .collect()
    }

    /// Lifts with right-image positions that are already known.
    pub fn lift_pairs(&mut self, calib: &CameraCalibration, left: &[Point2], right: &[Point2]) -> Vec<LiftedPoint> {
        left.iter()
            .zip(right)
            .enumerate()
            .map(|(i, (&p, q))| self.resolve(calib, i, p, q.is_finite().then_some(q.x)))
            .collect()
    }
}

fn require<'a, T>(value: Option<&'a T>, what: &'static str) -> Result<&'a T, TrackerError> {
    value.ok_or(TrackerError::MissingInput(what))
}

fn points2(estimates: Estimates) -> Result<Vec<Point2>, TrackerError> {
    match estimates {
        Estimates::Points2(p) => Ok(p),
        Estimates::Points3(_) => Err(TrackerError::Failed("inner tracker returned 3D points".into())),
    }
}

fn inner_init<'a>(init: &TrackerInit<'a>) -> TrackerInit<'a> {
    TrackerInit {
        start_points: init.start_points,
        left: init.left,
        right: init.right,
        calibration: init.calibration,
        mode: Mode::TwoD,
    }
}

/// Tracks in the left image and lifts each estimate by an epipolar search
/// in the right image.
pub struct LiftedTracker {
    name: String,
    inner: Box<dyn Tracker>,
    lifter: StereoLifter,
    config: LiftConfig,
    calibration: Option<CameraCalibration>,
}

impl LiftedTracker {
    pub fn new(inner: Box<dyn Tracker>, config: LiftConfig) -> Self {
        Self {
            name: format!("{}+lift", inner.name()),
            inner,
            lifter: StereoLifter::new(config.clone(), 0),
            config,
            calibration: None,
        }
    }

    pub fn flags(&self) -> &[LiftFlag] {
        self.lifter.flags()
    }
}

impl Tracker for LiftedTracker {
    fn name(&self) -> &str {
        &self.name
    }

    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError> {
        require(init.right, "the right image")?;
        let calib = require(init.calibration, "the stereo calibration")?;
        self.calibration = Some(calib.clone());
        self.lifter = StereoLifter::new(self.config.clone(), init.start_points.len());
        self.inner.init(&inner_init(init))
    }

    fn step(&mut self, frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError> {
        let right = require(frame.right, "the right image")?;
        let calib = self
            .calibration
            .as_ref()
            .ok_or(TrackerError::Failed("step before init".into()))?;
        let left_points = points2(self.inner.step(frame)?)?;
        let lifted = self.lifter.lift(calib, frame.left, right, &left_points);
        Ok(Estimates::Points3(lifted.into_iter().map(|l| l.position_mm).collect()))
    }
}

/// Runs one 2D tracker per eye and triangulates the two tracks.
pub struct StereoPairTracker {
    name: String,
    left: Box<dyn Tracker>,
    right: Box<dyn Tracker>,
    lifter: StereoLifter,
    config: LiftConfig,
    calibration: Option<CameraCalibration>,
}

impl StereoPairTracker {
    pub fn new(left: Box<dyn Tracker>, right: Box<dyn Tracker>, config: LiftConfig) -> Self {
        Self {
            name: format!("{}+pair", left.name()),
            left,
            right,
            lifter: StereoLifter::new(config.clone(), 0),
            config,
            calibration: None,
        }
    }

    pub fn flags(&self) -> &[LiftFlag] {
        self.lifter.flags()
    }
}

/// Swaps the eyes of a frame so the right tracker sees the right image.
fn as_right<'a>(frame: &StereoFrame<'a>, right: &'a LumaImage) -> StereoFrame<'a> {
    StereoFrame {
        index: frame.index,
        left: right,
        right: Some(frame.left),
    }
}

impl Tracker for StereoPairTracker {
    fn name(&self) -> &str {
        &self.name
    }

    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError> {
        let right = require(init.right, "the right image")?;
        let calib = require(init.calibration, "the stereo calibration")?;
        self.calibration = Some(calib.clone());
        self.lifter = StereoLifter::new(self.config.clone(), init.start_points.len());

        // Seed the right tracker at the matched location, or at the nominal depth.
        let nominal = calib.focal() * calib.baseline_m / self.config.fallback_depth_m;
        let right_start: Vec<Point2> = init
            .start_points
            .iter()
            .map(|&p| match find_right_match(init.left, right, calib, p, &self.config) {
                Some(m) => m.right,
                None => Point2::new(p.x - calib.left.cx + calib.right.cx - nominal, p.y),
            })
            .collect();

        self.left.init(&inner_init(init))?;
        self.right.init(&TrackerInit {
            start_points: &right_start,
            left: right,
            right: Some(init.left),
            calibration: init.calibration,
            mode: Mode::TwoD,
        })
    }

    fn step(&mut self, frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError> {
        let right = require(frame.right, "the right image")?;
        let calib = self
            .calibration
            .as_ref()
            .ok_or(TrackerError::Failed("step before init".into()))?;
        let l = points2(self.left.step(frame)?)?;
        let r = points2(self.right.step(&as_right(frame, right))?)?;
        let lifted = self.lifter.lift_pairs(calib, &l, &r);
        Ok(Estimates::Points3(lifted.into_iter().map(|p| p.position_mm).collect()))
    }
}
