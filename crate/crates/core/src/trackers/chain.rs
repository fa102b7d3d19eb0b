use crate::exec::Execution;
use crate::harness::{Estimates, StereoFrame, Tracker, TrackerError, TrackerInit};
use crate::imaging::{rescale, LumaImage, ScaleFactor};
use crate::point::Point2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainParams {
    pub levels: usize,
    pub iterations: usize,
    /// Odd integration window side.
    pub window: usize,
    /// Minimum eigenvalue of the per-pixel structure tensor.
    pub min_eigen: f64,
    /// Stop iterating once the update is shorter than this, pixels.
    pub epsilon: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            levels: 3,
            iterations: 10,
            window: 15,
            min_eigen: 1e-2,
            epsilon: 0.01,
            execution: Execution::default(),
        }
    }
}

/// Image pyramid with central-difference gradients per level.
pub struct Pyramid {
    levels: Vec<LumaImage>,
    grad_x: Vec<LumaImage>,
    grad_y: Vec<LumaImage>,
}

impl Pyramid {
    pub fn build(image: &LumaImage, levels: usize) -> Self {
        let mut imgs = vec![image.clone()];
        for _ in 1..levels.max(1) {
            let next = rescale(imgs.last().expect("non-empty"), ScaleFactor::Half);
            imgs.push(next);
        }
        let grad = |img: &LumaImage, horizontal: bool| {
            LumaImage::from_fn(img.width(), img.height(), |x, y| {
                let (x, y) = (x as isize, y as isize);
                if horizontal {
                    0.5 * (img.get_clamped(x + 1, y) - img.get_clamped(x - 1, y))
                } else {
                    0.5 * (img.get_clamped(x, y + 1) - img.get_clamped(x, y - 1))
                }
            })
        };
        Self {
            grad_x: imgs.iter().map(|i| grad(i, true)).collect(),
            grad_y: imgs.iter().map(|i| grad(i, false)).collect(),
            levels: imgs,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &LumaImage {
        &self.levels[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LkOutcome {
    /// Displacement in base-level pixels.
    pub dx: f64,
    pub dy: f64,
    /// The structure tensor at the base level was near-singular; the
    /// displacement is zero.
    pub low_texture: bool,
}

fn track_one(prev: &Pyramid, next: &Pyramid, point: Point2, params: &ChainParams) -> LkOutcome {
    let half = (params.window / 2) as isize;
    let n = (params.window * params.window) as f64;
    let (mut gx, mut gy) = (0.0f64, 0.0f64);
    let top = prev.depth().min(next.depth());

    for level in (0..top).rev() {
        let scale = f64::from(1u32 << level);
        let p = point.scale(1.0 / scale);
        let (img, ix_img, iy_img, next_img) = (
            &prev.levels[level],
            &prev.grad_x[level],
            &prev.grad_y[level],
            &next.levels[level],
        );

        let mut samples = Vec::with_capacity(params.window * params.window);
        let (mut gxx, mut gxy, mut gyy) = (0.0, 0.0, 0.0);
        for j in -half..=half {
            for i in -half..=half {
                let (x, y) = (p.x + i as f64, p.y + j as f64);
                let ix = f64::from(ix_img.sample(x, y));
                let iy = f64::from(iy_img.sample(x, y));
                gxx += ix * ix;
                gxy += ix * iy;
                gyy += iy * iy;
                samples.push((x, y, f64::from(img.sample(x, y)), ix, iy));
            }
        }
        let trace = gxx + gyy;
        let det = gxx * gyy - gxy * gxy;
        let min_eig = 0.5 * (trace - ((gxx - gyy).powi(2) + 4.0 * gxy * gxy).sqrt());
        if min_eig / n < params.min_eigen || det <= 0.0 {
            if level == 0 {
                return LkOutcome {
                    dx: 0.0,
                    dy: 0.0,
                    low_texture: true,
                };
            }
            gx *= 2.0;
            gy *= 2.0;
            continue;
        }

        let (mut dx, mut dy) = (0.0, 0.0);
        for _ in 0..params.iterations {
            let (mut bx, mut by) = (0.0, 0.0);
            for &(x, y, ival, ix, iy) in &samples {
                let diff = ival - f64::from(next_img.sample(x + gx + dx, y + gy + dy));
                bx += diff * ix;
                by += diff * iy;
            }
            let ex = (gyy * bx - gxy * by) / det;
            let ey = (gxx * by - gxy * bx) / det;
            dx += ex;
            dy += ey;
            if ex.hypot(ey) < params.epsilon {
                break;
            }
        }
        if level > 0 {
            gx = 2.0 * (gx + dx);
            gy = 2.0 * (gy + dy);
        } else {
            gx += dx;
            gy += dy;
        }
    }
    LkOutcome {
        dx: gx,
        dy: gy,
        low_texture: false,
    }
}

/// Coarse-to-fine iterative least-squares displacement of each point
/// between two pyramids.
pub fn track_points_lk(prev: &Pyramid, next: &Pyramid, points: &[Point2], params: &ChainParams) -> Vec<LkOutcome> {
    params.execution.map(points, |&p| track_one(prev, next, p, params))
}

/// Chains frame-to-frame flow on half-scale frames.
pub struct ChainTracker {
    params: ChainParams,
    prev: Option<Pyramid>,
    /// Half-scale coordinates.
    positions: Vec<Point2>,
    low_texture: Vec<bool>,
    lost: Vec<bool>,
}

impl ChainTracker {
    pub fn new(params: ChainParams) -> Self {
        assert!(params.window % 2 == 1, "window side must be odd");
        Self {
            params,
            prev: None,
            positions: Vec::new(),
            low_texture: Vec::new(),
            lost: Vec::new(),
        }
    }

    /// Points whose last update hit a near-singular structure tensor.
    pub fn low_texture(&self) -> &[bool] {
        &self.low_texture
    }

    pub fn lost(&self) -> &[bool] {
        &self.lost
    }
}

impl Tracker for ChainTracker {
    fn name(&self) -> &str {
        "chain"
    }

    fn init(&mut self, init: &TrackerInit<'_>) -> Result<(), TrackerError> {
        let half = rescale(init.left, ScaleFactor::Half);
        self.prev = Some(Pyramid::build(&half, self.params.levels));
        self.positions = init.start_points.iter().map(|p| p.scale(0.5)).collect();
        self.low_texture = vec![false; self.positions.len()];
        self.lost = vec![false; self.positions.len()];
        Ok(())
    }

    fn step(&mut self, frame: &StereoFrame<'_>) -> Result<Estimates, TrackerError> {
        let prev = self.prev.take().ok_or(TrackerError::Failed("step before init".into()))?;
        let half = rescale(frame.left, ScaleFactor::Half);
        let next = Pyramid::build(&half, self.params.levels);
        let outcomes = track_points_lk(&prev, &next, &self.positions, &self.params);
        for (i, o) in outcomes.iter().enumerate() {
            self.low_texture[i] = o.low_texture;
            if self.lost[i] {
                continue;
            }
            let moved = self.positions[i].offset(o.dx, o.dy);
            if moved.is_finite() && half.contains(moved.x, moved.y) {
                self.positions[i] = moved;
            } else {
                self.lost[i] = true;
            }
        }
        self.prev = Some(next);
        Ok(Estimates::Points2(self.positions.iter().map(|p| p.scale(2.0)).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Mode;

    fn texture(x: f64, y: f64) -> f32 {
        (128.0 + 45.0 * (x * 0.19).sin() * (y * 0.23).cos() + 35.0 * ((x - 1.5 * y) * 0.11).sin()
            + 20.0 * ((0.3 * x + 0.4 * y).cos()))
            as f32
    }

    fn shifted(w: usize, h: usize, dx: f64, dy: f64) -> LumaImage {
        LumaImage::from_fn(w, h, |x, y| texture(x as f64 - dx, y as f64 - dy))
    }

    fn params() -> ChainParams {
        ChainParams {
            execution: Execution::Sequential,
            ..ChainParams::default()
        }
    }

    fn track(frames: &[LumaImage], start: &[Point2]) -> (ChainTracker, Vec<Point2>) {
        let mut t = ChainTracker::new(params());
        t.init(&TrackerInit {
            start_points: start,
            left: &frames[0],
            right: None,
            calibration: None,
            mode: Mode::TwoD,
        })
        .unwrap();
        let mut out = Vec::new();
        for (i, f) in frames.iter().enumerate() {
            let Estimates::Points2(p) = t.step(&StereoFrame { index: i, left: f, right: None }).unwrap() else {
                unreachable!()
            };
            out = p;
        }
        (t, out)
    }

    #[test]
    fn integer_translation_is_recovered() {
        let a = shifted(200, 160, 0.0, 0.0);
        let b = shifted(200, 160, 3.0, 0.0);
        let pa = Pyramid::build(&a, 3);
        let pb = Pyramid::build(&b, 3);
        let pts = [Point2::new(80.0, 70.0), Point2::new(120.3, 90.6)];
        for o in track_points_lk(&pa, &pb, &pts, &params()) {
            assert!((o.dx - 3.0).abs() < 0.25 && o.dy.abs() < 0.25, "{o:?}");
        }
        // Same through the tracker, which works at half scale.
        let (_, out) = track(&[a, b], &pts);
        for (p, s) in out.iter().zip(&pts) {
            assert!(p.distance(&s.offset(3.0, 0.0)) < 0.25, "{p:?}");
        }
    }

    #[test]
    fn textureless_frame_gives_zero_and_flag() {
        let flat = LumaImage::filled(120, 100, 90.0);
        let start = [Point2::new(60.0, 50.0)];
        let (t, out) = track(&[flat.clone(), flat], &start);
        assert_eq!(out, start.to_vec());
        assert_eq!(t.low_texture(), &[true]);
    }

    #[test]
    fn drift_over_fifty_frames_is_small() {
        let frames: Vec<_> = (0..50).map(|k| shifted(240, 160, k as f64, 0.0)).collect();
        let start = [Point2::new(60.0, 80.0), Point2::new(100.0, 60.0)];
        let (_, out) = track(&frames, &start);
        for (p, s) in out.iter().zip(&start) {
            assert!(p.distance(&s.offset(49.0, 0.0)) < 3.0, "{p:?}");
        }
    }

    #[test]
    fn equivariant_under_translation() {
        let start = [Point2::new(90.0, 70.0)];
        let base: Vec<_> = (0..4).map(|k| shifted(220, 180, 1.5 * k as f64, 0.5 * k as f64)).collect();
        let (_, a) = track(&base, &start);
        let (u, v) = (7.0, -4.0);
        let moved: Vec<_> = (0..4)
            .map(|k| shifted(220, 180, 1.5 * k as f64 + u, 0.5 * k as f64 + v))
            .collect();
        let (_, b) = track(&moved, &[start[0].offset(u, v)]);
        assert!(b[0].distance(&a[0].offset(u, v)) < 0.25, "{:?} vs {:?}", b[0], a[0]);
    }
}
