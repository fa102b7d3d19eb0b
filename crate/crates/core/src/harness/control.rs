use super::{Estimates, Mode, StereoFrame, Tracker, TrackerError, TrackerInit};
use crate::point::Point3;
use crate::trackers::{LiftConfig, StereoLifter};

/// Zero-motion baseline: every step returns the start points.
pub struct ControlTracker {
    lift: LiftConfig,
    held: Estimates,
}

impl ControlTracker {
    pub fn new(lift: LiftConfig) -> Self {
        Self {
            lift,
            held: Estimates::Points2(Vec::new()),
        }
    }
}

impl Default for ControlTracker {
    fn default() -> Self {
        Self::new(LiftConfig::default())
    }
}

impl Tracker for ControlTracker {
    fn name(&self) -> &str {
        "control"
    }

    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError> {
        self.held = match init.mode {
            Mode::TwoD => Estimates::Points2(init.start_points.to_vec()),
            Mode::ThreeD => {
                let right = init.right.ok_or(TrackerError::MissingInput("the right image"))?;
                let calib = init
                    .calibration
                    .ok_or(TrackerError::MissingInput("the stereo calibration"))?;
                let mut lifter = StereoLifter::new(self.lift.clone(), init.start_points.len());
                let lifted: Vec<Point3> = lifter
                    .lift(calib, init.left, right, init.start_points)
                    .into_iter()
                    .map(|l| l.position_mm)
                    .collect();
                Estimates::Points3(lifted)
            }
        };
        Ok(())
    }

    fn step(&mut self, _frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError> {
        Ok(self.held.clone())
    }
}
