//! Classical baseline trackers.
//!
//! - [`TemplateTracker`]: adaptive NCC template matching with a 29x29 region
//!   per point on half-scale frames.
//! - [`ChainTracker`]: frame-to-frame pyramidal least-squares flow.
//! - [`LiftedTracker`] / [`StereoPairTracker`]: turn any 2D tracker into a
//!   3D one via stereo disparity.

mod chain;
mod lift;
mod template;

pub use chain::{track_points_lk, ChainParams, ChainTracker, LkOutcome, Pyramid};
pub use lift::{
    find_right_match, LiftConfig, LiftFlag, LiftStrategy, LiftedPoint, LiftedTracker, RightMatch,
    StereoLifter, StereoPairTracker,
};
pub use template::{TemplateParams, TemplateTracker};

use crate::harness::{ControlTracker, Mode, Tracker};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackerKind {
    Control,
    Template,
    Chain,
}

impl TrackerKind {
    pub const ALL: [TrackerKind; 3] = [TrackerKind::Control, TrackerKind::Template, TrackerKind::Chain];

    pub fn name(self) -> &'static str {
        match self {
            TrackerKind::Control => "control",
            TrackerKind::Template => "template",
            TrackerKind::Chain => "chain",
        }
    }
}

impl FromStr for TrackerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown tracker {s:?} (expected control, template or chain)"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerParams {
    pub template: TemplateParams,
    pub chain: ChainParams,
    pub lift: LiftConfig,
    pub lift_strategy: LiftStrategy,
}

/// Builds a fresh tracker instance for one sequence.
pub fn build_tracker(kind: TrackerKind, mode: Mode, params: &TrackerParams) -> Box<dyn Tracker> {
    let two_d = |kind| -> Box<dyn Tracker> {
        match kind {
            TrackerKind::Control => Box::new(ControlTracker::new(params.lift.clone())),
            TrackerKind::Template => Box::new(TemplateTracker::new(params.template.clone())),
            TrackerKind::Chain => Box::new(ChainTracker::new(params.chain.clone())),
        }
    };
    match (mode, kind) {
        (Mode::TwoD, _) | (Mode::ThreeD, TrackerKind::Control) => two_d(kind),
        (Mode::ThreeD, _) => match params.lift_strategy {
            LiftStrategy::Epipolar => Box::new(LiftedTracker::new(two_d(kind), params.lift.clone())),
            LiftStrategy::BothEyes => {
                Box::new(StereoPairTracker::new(two_d(kind), two_d(kind), params.lift.clone()))
            }
        },
    }
}
