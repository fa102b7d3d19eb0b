use super::LumaImage;
use crate::point::Point2;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum NccError {
    #[error("degenerate patch: zero intensity variance")]
    DegeneratePatch,
    #[error("patch sides differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
}

/// Square intensity patch with an odd side so a centre pixel exists.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    side: usize,
    values: Vec<f64>,
}

impl Patch {
    /// Panics if `side` is even or `values` is not `side * side` long.
    pub fn new(side: usize, values: Vec<f64>) -> Self {
        assert!(side % 2 == 1, "patch side must be odd");
        assert_eq!(values.len(), side * side, "patch buffer does not match side");
        Self { side, values }
    }

    /// Bilinear patch centred on `centre`, clamping at the image border.
    pub fn sample(image: &LumaImage, centre: Point2, side: usize) -> Self {
        let half = (side / 2) as f64;
        let mut values = Vec::with_capacity(side * side);
        for j in 0..side {
            for i in 0..side {
                let x = centre.x - half + i as f64;
                let y = centre.y - half + j as f64;
                values.push(f64::from(image.sample(x, y)));
            }
        }
        Self::new(side, values)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.side, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Zero-mean, unit-variance correlation of two equally sized patches,
/// clamped to `[-1, 1]`.
pub fn ncc(a: &Patch, b: &Patch) -> Result<f64, NccError> {
    if a.side != b.side {
        return Err(NccError::SizeMismatch(a.side, b.side));
    }
    let n = a.values.len() as f64;
    let mean_a = a.values.iter().sum::<f64>() / n;
    let mean_b = b.values.iter().sum::<f64>() / n;
    let (mut cross, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (&va, &vb) in a.values.iter().zip(&b.values) {
        let da = va - mean_a;
        let db = vb - mean_b;
        cross += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    let denom = (var_a * var_b).sqrt();
    if !(denom > 0.0) || var_a <= f64::EPSILON * n || var_b <= f64::EPSILON * n {
        return Err(NccError::DegeneratePatch);
    }
    Ok((cross / denom).clamp(-1.0, 1.0))
}

/// Zero-mean template with cached norm, for scoring many windows of one
/// image against the same reference.
#[derive(Clone, Debug)]
pub struct PreparedTemplate {
    side: usize,
    centred: Vec<f64>,
    norm: f64,
}

impl PreparedTemplate {
    pub fn new(patch: &Patch) -> Result<Self, NccError> {
        let n = patch.values.len() as f64;
        let mean = patch.values.iter().sum::<f64>() / n;
        let centred: Vec<f64> = patch.values.iter().map(|v| v - mean).collect();
        let var = centred.iter().map(|v| v * v).sum::<f64>();
        if var <= f64::EPSILON * n {
            return Err(NccError::DegeneratePatch);
        }
        Ok(Self {
            side: patch.side,
            centred,
            norm: var.sqrt(),
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Scores the window of `data` (row stride `stride`) whose top-left
    /// corner is at `(x0, y0)`. Returns `None` for a flat window.
    pub fn score(&self, data: &[f32], stride: usize, x0: usize, y0: usize) -> Option<f64> {
        let side = self.side;
        let n = (side * side) as f64;
        let (mut sum, mut sum_sq, mut cross) = (0.0f64, 0.0f64, 0.0f64);
        for j in 0..side {
            let row = &data[(y0 + j) * stride + x0..(y0 + j) * stride + x0 + side];
            let trow = &self.centred[j * side..(j + 1) * side];
            for (&v, &t) in row.iter().zip(trow) {
                let v = f64::from(v);
                sum += v;
                sum_sq += v * v;
                cross += v * t;
            }
        }
        // The template is zero-mean, so the window mean drops out of `cross`.
        let var = sum_sq - sum * sum / n;
        if var <= 1e-9 * n {
            return None;
        }
        Some((cross / (var.sqrt() * self.norm)).clamp(-1.0, 1.0))
    }
}
