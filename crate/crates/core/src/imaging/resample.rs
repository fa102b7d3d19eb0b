use super::LumaImage;

/// Supported rescale factors. Coordinates map as `p_scaled = p * factor`
/// with pixel centres on integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleFactor {
    Half,
    Double,
}

impl ScaleFactor {
    pub fn value(self) -> f64 {
        match self {
            ScaleFactor::Half => 0.5,
            ScaleFactor::Double => 2.0,
        }
    }
}

pub fn rescale(image: &LumaImage, factor: ScaleFactor) -> LumaImage {
    match factor {
        ScaleFactor::Half => downsample(image),
        ScaleFactor::Double => upsample(image),
    }
}

// [1 2 1]/4 prefilter then decimation at even pixels, which keeps the
// `p / 2` coordinate mapping exact.
fn downsample(image: &LumaImage) -> LumaImage {
    let (w, h) = image.dimensions();
    let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));
    let mut rows = LumaImage::new(ow, h);
    for y in 0..h {
        for ox in 0..ow {
            let x = (2 * ox) as isize;
            let v = 0.25 * image.get_clamped(x - 1, y as isize)
                + 0.5 * image.get_clamped(x, y as isize)
                + 0.25 * image.get_clamped(x + 1, y as isize);
            rows.set(ox, y, v);
        }
    }
    LumaImage::from_fn(ow, oh, |ox, oy| {
        let y = (2 * oy) as isize;
        0.25 * rows.get_clamped(ox as isize, y - 1)
            + 0.5 * rows.get_clamped(ox as isize, y)
            + 0.25 * rows.get_clamped(ox as isize, y + 1)
    })
}

fn upsample(image: &LumaImage) -> LumaImage {
    let (w, h) = image.dimensions();
    LumaImage::from_fn(2 * w, 2 * h, |x, y| image.sample(x as f64 * 0.5, y as f64 * 0.5))
}
