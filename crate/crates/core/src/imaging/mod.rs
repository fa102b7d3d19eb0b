//! Pixel primitives for tattoo segmentation and patch correlation.

mod morphology;
mod ncc;
mod resample;
mod segments;

pub use morphology::{dilate, erode, morphological_open};
pub use ncc::{ncc, NccError, Patch, PreparedTemplate};
pub use resample::{rescale, ScaleFactor};
pub use segments::{extract_segments, Segment, SegmentSet};

use image::GrayImage;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("mask pixel ({x}, {y}) has value {value}; masks must be strictly 0 or 255")]
    NonBinaryMask { x: u32, y: u32, value: u8 },
}

/// Single-channel floating point image, row-major, intensities on the
/// 8-bit scale.
#[derive(Clone, Debug, PartialEq)]
pub struct LumaImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl LumaImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Panics if `data.len() != width * height`.
    pub fn from_vec(width: usize, height: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), width * height, "buffer does not match dimensions");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_gray8(img: &GrayImage) -> Self {
        Self {
            width: img.width() as usize,
            height: img.height() as usize,
            data: img.as_raw().iter().map(|&v| f32::from(v)).collect(),
        }
    }

    /// Rounds and saturates to 8 bits.
    pub fn to_gray8(&self) -> GrayImage {
        let raw = self
            .data
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .expect("dimensions match buffer")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.data[y * self.width + x] = value;
    }

    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f32 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Bilinear sample with edge clamping. Pixel centres sit on integer
    /// coordinates.
    pub fn sample(&self, x: f64, y: f64) -> f32 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = (x - x0) as f32;
        let fy = (y - y0) as f32;
        let (xi, yi) = (x0 as isize, y0 as isize);
        let a = self.get_clamped(xi, yi);
        let b = self.get_clamped(xi + 1, yi);
        let c = self.get_clamped(xi, yi + 1);
        let d = self.get_clamped(xi + 1, yi + 1);
        let top = a + (b - a) * fx;
        let bottom = c + (d - c) * fx;
        top + (bottom - top) * fy
    }

    /// True when `(x, y)` can be sampled without touching the clamped border.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= (self.width - 1) as f64 && y <= (self.height - 1) as f64
    }
}

/// Per-pixel binary segmentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Accepts only 0 and 255 pixel values.
    pub fn from_gray8(img: &GrayImage) -> Result<Self, ImagingError> {
        let width = img.width() as usize;
        let mut bits = Vec::with_capacity(img.as_raw().len());
        for (i, &value) in img.as_raw().iter().enumerate() {
            match value {
                0 => bits.push(false),
                255 => bits.push(true),
                _ => {
                    return Err(ImagingError::NonBinaryMask {
                        x: (i % width) as u32,
                        y: (i / width) as u32,
                        value,
                    })
                }
            }
        }
        Ok(Self {
            width,
            height: img.height() as usize,
            bits,
        })
    }

    pub fn to_gray8(&self) -> GrayImage {
        let raw = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .expect("dimensions match buffer")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Every pixel set here is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Strict threshold: a pixel is set iff its intensity exceeds `tau`.
pub fn threshold_ir(ir: &LumaImage, tau: f32) -> BinaryMask {
    BinaryMask {
        width: ir.width,
        height: ir.height,
        bits: ir.data.iter().map(|&v| v > tau).collect(),
    }
}
