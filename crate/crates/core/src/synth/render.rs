use crate::imaging::LumaImage;
use rand::Rng;

/// Smooth lattice noise in `[0, 1)`. Lattice values come from the caller's
/// RNG; lookups outside the lattice clamp to its edge.
#[derive(Clone, Debug)]
pub struct ValueNoise {
    cell: f64,
    x0: f64,
    y0: f64,
    cols: usize,
    rows: usize,
    values: Vec<f32>,
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

impl ValueNoise {
    /// Covers `[x_min, x_max] x [y_min, y_max]` with lattice spacing `cell`.
    pub fn new<R: Rng>(rng: &mut R, cell: f64, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        let cols = ((x_range.1 - x_range.0) / cell).ceil() as usize + 2;
        let rows = ((y_range.1 - y_range.0) / cell).ceil() as usize + 2;
        let values = (0..cols * rows).map(|_| rng.gen::<f32>()).collect();
        Self {
            cell,
            x0: x_range.0,
            y0: y_range.0,
            cols,
            rows,
            values,
        }
    }

    fn lattice(&self, i: isize, j: isize) -> f64 {
        let i = i.clamp(0, self.cols as isize - 1) as usize;
        let j = j.clamp(0, self.rows as isize - 1) as usize;
        f64::from(self.values[j * self.cols + i])
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.x0) / self.cell;
        let v = (y - self.y0) / self.cell;
        let (i, j) = (u.floor(), v.floor());
        let (tx, ty) = (smooth(u - i), smooth(v - j));
        let (i, j) = (i as isize, j as isize);
        let top = self.lattice(i, j) * (1.0 - tx) + self.lattice(i + 1, j) * tx;
        let bottom = self.lattice(i, j + 1) * (1.0 - tx) + self.lattice(i + 1, j + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// Tissue-like background: two octaves of value noise.
#[derive(Clone, Debug)]
pub struct Tissue {
    coarse: ValueNoise,
    fine: ValueNoise,
}

impl Tissue {
    pub fn new<R: Rng>(rng: &mut R, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            coarse: ValueNoise::new(rng, 12.0, x_range, y_range),
            fine: ValueNoise::new(rng, 4.0, x_range, y_range),
        }
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        40.0 + 175.0 * (0.65 * self.coarse.at(x, y) + 0.35 * self.fine.at(x, y))
    }
}

/// A textured disk in the visible frames, in its own local coordinates.
#[derive(Clone, Debug)]
pub struct Disk {
    pub radius: f64,
    texture: ValueNoise,
}

impl Disk {
    pub fn new<R: Rng>(rng: &mut R, radius: f64) -> Self {
        let r = radius + 4.0;
        Self {
            radius,
            texture: ValueNoise::new(rng, 3.0, (-r, r), (-r, r)),
        }
    }

    /// Intensity at local offset `(u, v)` from the centre, if inside.
    pub fn at(&self, u: f64, v: f64) -> Option<f64> {
        (u * u + v * v < self.radius * self.radius).then(|| 30.0 + 200.0 * self.texture.at(u, v))
    }
}

/// Isotropic Gaussian IR spot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blob {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
    pub peak: f64,
}

pub const BLOB_PEAK: f64 = 220.0;

/// Sums the blobs over a dark background and rounds to 8-bit levels.
pub fn render_ir(width: usize, height: usize, blobs: &[Blob]) -> LumaImage {
    let mut img = LumaImage::new(width, height);
    for b in blobs {
        let reach = (b.sigma * 6.0).ceil();
        let x_lo = (b.x - reach).floor().max(0.0) as usize;
        let y_lo = (b.y - reach).floor().max(0.0) as usize;
        let x_hi = ((b.x + reach).ceil() as usize).min(width.saturating_sub(1));
        let y_hi = ((b.y + reach).ceil() as usize).min(height.saturating_sub(1));
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                let d2 = (x as f64 - b.x).powi(2) + (y as f64 - b.y).powi(2);
                let v = f64::from(img.get(x, y)) + b.peak * (-d2 / (2.0 * b.sigma * b.sigma)).exp();
                img.set(x, y, v as f32);
            }
        }
    }
    LumaImage::from_fn(width, height, |x, y| img.get(x, y).round().clamp(0.0, 255.0))
}

/// One visible frame. `background` maps a pixel to a tissue coordinate;
/// disks are drawn at `centres` on top.
pub fn render_visible(
    width: usize,
    height: usize,
    tissue: &Tissue,
    background: impl Fn(f64, f64) -> (f64, f64),
    disks: &[(&Disk, f64, f64)],
) -> LumaImage {
    LumaImage::from_fn(width, height, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        for &(disk, cx, cy) in disks {
            if let Some(v) = disk.at(xf - cx, yf - cy) {
                return v as f32;
            }
        }
        let (u, v) = background(xf, yf);
        tissue.at(u, v) as f32
    })
}
