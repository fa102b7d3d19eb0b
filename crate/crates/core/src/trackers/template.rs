use crate::exec::Execution;
use crate::harness::{Estimates, StereoFrame, Tracker, TrackerError, TrackerInit};
use crate::imaging::{rescale, LumaImage, Patch, PreparedTemplate, ScaleFactor};
use crate::point::Point2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemplateParams {
    /// Side of the square region tracked per point, half-scale pixels.
    pub roi_px: usize,
    /// Exhaustive search radius around the previous position, half-scale pixels.
    pub search_radius: usize,
    /// Per-frame weight of the newest appearance in the template.
    pub blend: f64,
    /// A best match scoring below this means the content has left the
    /// search window; the point is frozen and flagged lost.
    pub min_ncc: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for TemplateParams {
    fn default() -> Self {
        Self {
            roi_px: 29,
            search_radius: 16,
            blend: 0.05,
            min_ncc: 0.5,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
struct PointState {
    template: Vec<f64>,
    /// Half-scale coordinates.
    pos: Point2,
    confidence: f64,
    lost: bool,
}

/// Adaptive NCC template tracker working on half-scale frames.
pub struct TemplateTracker {
    params: TemplateParams,
    points: Vec<PointState>,
}

impl TemplateTracker {
    pub fn new(params: TemplateParams) -> Self {
        assert!(params.roi_px % 2 == 1, "template side must be odd");
        Self {
            params,
            points: Vec::new(),
        }
    }

    pub fn lost(&self) -> Vec<bool> {
        self.points.iter().map(|p| p.lost).collect()
    }

    /// Last best NCC score per point.
    pub fn confidence(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.confidence).collect()
    }

    fn estimates(&self) -> Estimates {
        Estimates::Points2(self.points.iter().map(|p| p.pos.scale(2.0)).collect())
    }
}

// Vertex offset of the parabola through three samples around a maximum.
fn parabola_peak(left: f64, centre: f64, right: f64) -> f64 {
    let denom = left - 2.0 * centre + right;
    if denom < 0.0 {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

fn update_point(state: &mut PointState, frame: &LumaImage, params: &TemplateParams) {
    if state.lost {
        return;
    }
    let roi = params.roi_px;
    let r = params.search_radius as isize;
    let half_roi = (roi / 2) as f64;
    let side = roi + 2 * params.search_radius;
    let reach = half_roi + r as f64;
    let pos = state.pos;

    let Ok(template) = PreparedTemplate::new(&Patch::new(roi, state.template.clone())) else {
        state.confidence = 0.0;
        return;
    };

    let mut region = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            region.push(frame.sample(pos.x - reach + i as f64, pos.y - reach + j as f64));
        }
    }

    let n = (2 * r + 1) as usize;
    let mut scores = vec![None; n * n];
    let mut best: Option<(f64, isize, isize)> = None;
    for dy in -r..=r {
        for dx in -r..=r {
            let cx = pos.x + dx as f64;
            let cy = pos.y + dy as f64;
            if !frame.contains(cx - half_roi, cy - half_roi) || !frame.contains(cx + half_roi, cy + half_roi) {
                continue;
            }
            let Some(score) = template.score(&region, side, (dx + r) as usize, (dy + r) as usize) else {
                continue;
            };
            scores[(dy + r) as usize * n + (dx + r) as usize] = Some(score);
            let better = match best {
                None => true,
                Some((s, bx, by)) => {
                    score > s || (score == s && dx.abs() + dy.abs() < bx.abs() + by.abs())
                }
            };
            if better {
                best = Some((score, dx, dy));
            }
        }
    }

    let Some((score, dx, dy)) = best.filter(|b| b.0 >= params.min_ncc) else {
        state.lost = true;
        return;
    };

    // A perfect match is taken as-is.
    let (mut sx, mut sy) = (0.0, 0.0);
    if score < 1.0 - 1e-9 {
        let at = |x: isize, y: isize| -> Option<f64> {
            if x.abs() > r || y.abs() > r {
                return None;
            }
            scores[(y + r) as usize * n + (x + r) as usize]
        };
        if let (Some(a), Some(c)) = (at(dx - 1, dy), at(dx + 1, dy)) {
            sx = parabola_peak(a, score, c);
        }
        if let (Some(a), Some(c)) = (at(dx, dy - 1), at(dx, dy + 1)) {
            sy = parabola_peak(a, score, c);
        }
    }

    state.pos = pos.offset(dx as f64 + sx, dy as f64 + sy);
    state.confidence = score;
    if params.blend > 0.0 {
        let current = Patch::sample(frame, state.pos, roi);
        let a = params.blend;
        for (t, &c) in state.template.iter_mut().zip(current.values()) {
            *t = (1.0 - a) * *t + a * c;
        }
    }
}

impl Tracker for TemplateTracker {
    fn name(&self) -> &str {
        "template"
    }

    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError> {
        let half = rescale(init.left, ScaleFactor::Half);
        self.points = init
            .start_points
            .iter()
            .map(|p| {
                let pos = p.scale(0.5);
                PointState {
                    template: Patch::sample(&half, pos, self.params.roi_px).values().to_vec(),
                    pos,
                    confidence: 1.0,
                    lost: false,
                }
            })
            .collect();
        Ok(())
    }

    fn step(&mut self, frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError> {
        let half = rescale(frame.left, ScaleFactor::Half);
        let params = &self.params;
        params
            .execution
            .map_mut(&mut self.points, |p| update_point(p, &half, params));
        Ok(self.estimates())
    }
}
