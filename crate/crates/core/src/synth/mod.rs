//! Synthetic datasets in the benchmark layout, with a manifest of the true
//! positions, disparities and 3D points of every blob.
//!
//! Blob centres are placed on integer pixels and depths are snapped so the
//! disparity is a whole number of pixels. With an integer principal-point
//! difference the right-eye blobs are exact integer shifts of the left-eye
//! ones, so segmentation recovers both centroids exactly.

mod config;
mod render;

pub use config::{Motion, StereoSetup, SynthConfig};
pub use render::{render_ir, Blob, Disk, Tissue, ValueNoise, BLOB_PEAK};

use crate::dataset::{format_video_name, CameraCalibration, CALIB_FILE, END_IR, END_MASK, FRAMES_DIR, START_IR, START_MASK};
use crate::geometry::MM_PER_M;
use crate::groundtruth::GtConfig;
use crate::imaging::{extract_segments, morphological_open, threshold_ir, LumaImage};
use crate::point::{Point2, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use render::render_visible;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
const SPURIOUS_SIGMA: f64 = 1.5;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    Config(String),
    #[error("cannot place blobs: {0}")]
    Placement(String),
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
    #[error("cannot read manifest {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointManifest {
    pub id: usize,
    pub sigma: f64,
    pub depth_m: f64,
    /// Principal-point-adjusted disparity, pixels.
    pub disparity_px: f64,
    pub start_left: Point2,
    pub start_right: Point2,
    pub end_left: Point2,
    pub end_right: Point2,
    pub start_mm: Point3,
    pub end_mm: Point3,
    /// True left-eye position in every frame.
    pub trajectory: Vec<Point2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceManifest {
    pub session_id: String,
    /// Path relative to the dataset root, `<session>/<sequence>`.
    pub sequence_id: String,
    pub frames: usize,
    pub start_ms: u64,
    pub end_ms: u64,
    pub image_size: [u32; 2],
    pub background_disparity_px: f64,
    pub points: Vec<PointManifest>,
    /// Left-eye positions of blobs that appear in the start IR image only.
    pub spurious_start: Vec<Point2>,
    /// Number of segments in the start mask (tracked points plus spurious).
    pub point_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub schema_version: u32,
    pub config: SynthConfig,
    pub sequences: Vec<SequenceManifest>,
}

impl SynthManifest {
    pub fn total_points(&self) -> usize {
        self.sequences.iter().map(|s| s.point_count).sum()
    }

    pub fn read(path: &Path) -> Result<Self, SynthError> {
        let err = |message: String| SynthError::Read {
            path: path.to_owned(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let m: SynthManifest = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(err(format!("unsupported schema version {}", m.schema_version)));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), SynthError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| write_error(path, e))
    }
}

fn write_error(path: &Path, e: impl std::fmt::Display) -> SynthError {
    SynthError::Write {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

fn save_gray(image: &image::GrayImage, path: &Path) -> Result<(), SynthError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| write_error(dir, e))?;
    }
    image.save(path).map_err(|e| write_error(path, e))
}

fn save(image: &LumaImage, path: &Path) -> Result<(), SynthError> {
    save_gray(&image.to_gray8(), path)
}

pub fn calibration_for(config: &SynthConfig) -> CameraCalibration {
    let [lx, ly] = config.principal_left();
    let [rx, ry] = config.principal_right();
    CameraCalibration::rectified(config.stereo.focal_px, (lx, ly), (rx, ry), config.stereo.baseline_m)
        .with_image_size(config.image_width, config.image_height)
}

struct Placed {
    left: Point2,
    right: Point2,
    sigma: f64,
    depth_m: f64,
    disparity: f64,
}

/// Left-image pixel at depth `z_m` to millimetres, matching the geometry
/// module's backprojection.
fn to_mm(calib: &CameraCalibration, p: Point2, z_m: f64) -> Point3 {
    let k = &calib.left;
    Point3::new(
        (p.x - k.cx) * z_m / k.fx * MM_PER_M,
        (p.y - k.cy) * z_m / k.fy * MM_PER_M,
        z_m * MM_PER_M,
    )
}

fn right_of(calib: &CameraCalibration, p: Point2, disparity: f64) -> Point2 {
    Point2::new(
        p.x - calib.left.cx + calib.right.cx - disparity,
        p.y - calib.left.cy + calib.right.cy,
    )
}

fn place_blobs(
    config: &SynthConfig,
    calib: &CameraCalibration,
    offsets: &[(f64, f64)],
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Placed>, Vec<Point2>), SynthError> {
    let (w, h) = (f64::from(config.image_width), f64::from(config.image_height));
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| {
        offsets.iter().map(pick).fold(init, f)
    };
    let (min_ox, max_ox) = (fold(f64::min, 0.0, |o| o.0), fold(f64::max, 0.0, |o| o.0));
    let (min_oy, max_oy) = (fold(f64::min, 0.0, |o| o.1), fold(f64::max, 0.0, |o| o.1));
    let m = config.margin;
    let inside = |p: Point2| {
        p.x + min_ox >= m && p.x + max_ox <= w - 1.0 - m && p.y + min_oy >= m && p.y + max_oy <= h - 1.0 - m
    };
    let x_range = (m - min_ox).ceil()..=(w - 1.0 - m - max_ox).floor();
    let y_range = (m - min_oy).ceil()..=(h - 1.0 - m - max_oy).floor();
    if x_range.is_empty() || y_range.is_empty() {
        return Err(SynthError::Placement(format!(
            "a {}x{} image leaves no room for the motion with margin {m}",
            config.image_width, config.image_height
        )));
    }
    let b = config.stereo.baseline_m;
    let f = config.stereo.focal_px;
    let separated = |p: Point2, taken: &[Point2]| {
        taken
            .iter()
            .all(|q| p.distance(q) >= config.min_separation && (p.y - q.y).abs() >= config.min_row_separation)
    };

    let mut placed: Vec<Placed> = Vec::new();
    let mut occupied: Vec<Point2> = Vec::new();
    let mut occupied_right: Vec<Point2> = Vec::new();
    const TRIES: usize = 20_000;
    for i in 0..config.blobs {
        let mut ok = false;
        for _ in 0..TRIES {
            let left = Point2::new(rng.gen_range(x_range.clone()).round(), rng.gen_range(y_range.clone()).round());
            let z = if config.stereo.depths_m.is_empty() {
                let [lo, hi] = config.stereo.depth_range_m;
                if hi > lo { rng.gen_range(lo..=hi) } else { lo }
            } else {
                config.stereo.depths_m[i % config.stereo.depths_m.len()]
            };
            let sigma = rng.gen_range(config.blob_sigma[0]..=config.blob_sigma[1]);
            let disparity = (b * f / z).round().max(1.0);
            let right = right_of(calib, left, disparity);
            if !inside(left) || !inside(right) || !separated(left, &occupied) || !separated(right, &occupied_right) {
                continue;
            }
            occupied.push(left);
            occupied_right.push(right);
            placed.push(Placed {
                left,
                right,
                sigma,
                depth_m: b * f / disparity,
                disparity,
            });
            ok = true;
            break;
        }
        if !ok {
            return Err(SynthError::Placement(format!(
                "blob {i} violates the separation constraint after {TRIES} attempts; \
                 reduce the blob count or the separation"
            )));
        }
    }

    let mut spurious = Vec::new();
    for i in 0..config.spurious_start_blobs {
        let found = (0..TRIES).find_map(|_| {
            let p = Point2::new(rng.gen_range(x_range.clone()).round(), rng.gen_range(y_range.clone()).round());
            (inside(p) && separated(p, &occupied)).then_some(p)
        });
        let p = found.ok_or_else(|| SynthError::Placement(format!("spurious blob {i} does not fit")))?;
        occupied.push(p);
        spurious.push(p);
    }
    placed.sort_by(|a, b| a.left.y.total_cmp(&b.left.y).then(a.left.x.total_cmp(&b.left.x)));
    Ok((placed, spurious))
}

fn sequence_rng(seed: u64, index: usize, stream_bit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((index as u64) << 1) | stream_bit);
    rng
}

fn add_noise(img: &mut LumaImage, sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    let noisy = LumaImage::from_fn(img.width(), img.height(), |x, y| {
        (f64::from(img.get(x, y)) + normal.sample(rng)).clamp(0.0, 255.0) as f32
    });
    *img = noisy;
}

/// Renders sequence `index` of `config` under `root` and returns its
/// manifest entry.
pub fn generate_synthetic_sequence(
    config: &SynthConfig,
    index: usize,
    root: &Path,
) -> Result<SequenceManifest, SynthError> {
    config.validate().map_err(SynthError::Config)?;
    let calib = calibration_for(config);
    let (w, h) = (config.image_width as usize, config.image_height as usize);
    let n = config.frames_per_sequence;
    let offsets: Vec<(f64, f64)> = (0..n).map(|k| config.motion.offset(k)).collect();
    let mut rng = sequence_rng(config.seed, index, 0);
    let (placed, spurious) = place_blobs(config, &calib, &offsets, &mut rng)?;

    let session_id = config.sessions[index % config.sessions.len()].clone();
    let sequence_id = format!("{session_id}/seq{index:02}");
    let dir = root.join(&sequence_id);
    std::fs::create_dir_all(&dir).map_err(|e| write_error(&dir, e))?;
    calib.write(&dir.join(CALIB_FILE)).map_err(|e| write_error(&dir.join(CALIB_FILE), e))?;

    let start_ms = 1000 + 60_000 * index as u64;
    let end_ms = start_ms + (n as f64 * 1000.0 / config.fps).round().max(1.0) as u64;
    let video = format_video_name(start_ms, end_ms);
    let last = offsets[n - 1];

    // IR images and masks.
    let gt = GtConfig::default();
    let blobs_at = |shift: (f64, f64), right: bool| -> Vec<Blob> {
        placed
            .iter()
            .map(|p| {
                let base = if right { p.right } else { p.left };
                Blob {
                    x: base.x + shift.0,
                    y: base.y + shift.1,
                    sigma: p.sigma,
                    peak: BLOB_PEAK,
                }
            })
            .collect()
    };
    let mut start_left = blobs_at((0.0, 0.0), false);
    start_left.extend(spurious.iter().map(|p| Blob {
        x: p.x,
        y: p.y,
        sigma: SPURIOUS_SIGMA,
        peak: BLOB_PEAK,
    }));
    let ir_start_left = render_ir(w, h, &start_left);
    let ir_end_left = render_ir(w, h, &blobs_at(last, false));
    let ir_start_right = render_ir(w, h, &blobs_at((0.0, 0.0), true));
    let ir_end_right = render_ir(w, h, &blobs_at(last, true));
    let mask = |ir: &LumaImage| morphological_open(&threshold_ir(ir, gt.tau), gt.se_radius);
    let start_mask = mask(&ir_start_left);
    let point_count = extract_segments(&start_mask, gt.min_area).len();
    let left_dir = dir.join("left");
    let right_dir = dir.join("right");
    save(&ir_start_left, &left_dir.join(START_IR))?;
    save(&ir_end_left, &left_dir.join(END_IR))?;
    save_gray(&start_mask.to_gray8(), &left_dir.join(START_MASK))?;
    save_gray(&mask(&ir_end_left).to_gray8(), &left_dir.join(END_MASK))?;
    save(&ir_start_right, &right_dir.join(START_IR))?;
    save(&ir_end_right, &right_dir.join(END_IR))?;

    // Visible frames.
    let max_disp = placed.iter().map(|p| p.disparity).fold(0.0, f64::max);
    let min_disp = placed.iter().map(|p| p.disparity).fold(f64::INFINITY, f64::min);
    let background_disparity = if placed.is_empty() { 20.0 } else { (min_disp - 10.0).max(1.0) };
    let reach = offsets
        .iter()
        .map(|o| o.0.abs().max(o.1.abs()))
        .fold(0.0, f64::max);
    let pad = reach + max_disp + background_disparity + (calib.left.cx - calib.right.cx).abs() + 32.0;
    let tissue = Tissue::new(&mut rng, (-pad, w as f64 + pad), (-pad, h as f64 + pad));
    let disks: Vec<Disk> = placed.iter().map(|_| Disk::new(&mut rng, config.disk_radius)).collect();
    let mut noise_rng = sequence_rng(config.seed, index, 1);
    let (dcx, dcy) = (calib.left.cx - calib.right.cx, calib.left.cy - calib.right.cy);
    for (k, &(ox, oy)) in offsets.iter().enumerate() {
        let name = format!("{k:06}.png");
        let left_disks: Vec<_> = placed
            .iter()
            .zip(&disks)
            .map(|(p, d)| (d, p.left.x + ox, p.left.y + oy))
            .collect();
        let mut left = render_visible(w, h, &tissue, |x, y| (x - ox, y - oy), &left_disks);
        let right_disks: Vec<_> = placed
            .iter()
            .zip(&disks)
            .map(|(p, d)| (d, p.right.x + ox, p.right.y + oy))
            .collect();
        let mut right = render_visible(
            w,
            h,
            &tissue,
            |x, y| (x + dcx + background_disparity - ox, y + dcy - oy),
            &right_disks,
        );
        add_noise(&mut left, config.noise, &mut noise_rng);
        add_noise(&mut right, config.noise, &mut noise_rng);
        save(&left, &left_dir.join(FRAMES_DIR).join(&video).join(&name))?;
        save(&right, &right_dir.join(FRAMES_DIR).join(&video).join(&name))?;
    }

    let points = placed
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let end_left = p.left.offset(last.0, last.1);
            PointManifest {
                id,
                sigma: p.sigma,
                depth_m: p.depth_m,
                disparity_px: p.disparity,
                start_left: p.left,
                start_right: p.right,
                end_left,
                end_right: p.right.offset(last.0, last.1),
                start_mm: to_mm(&calib, p.left, p.depth_m),
                end_mm: to_mm(&calib, end_left, p.depth_m),
                trajectory: offsets.iter().map(|&(ox, oy)| p.left.offset(ox, oy)).collect(),
            }
        })
        .collect();

    Ok(SequenceManifest {
        session_id,
        sequence_id,
        frames: n,
        start_ms,
        end_ms,
        image_size: [config.image_width, config.image_height],
        background_disparity_px: background_disparity,
        points,
        spurious_start: spurious,
        point_count,
    })
}

/// Renders every sequence (in parallel when enabled) and writes
/// `manifest.json` at the root.
pub fn generate_dataset(config: &SynthConfig, root: &Path) -> Result<SynthManifest, SynthError> {
    config.validate().map_err(SynthError::Config)?;
    std::fs::create_dir_all(root).map_err(|e| write_error(root, e))?;
    let sequences = config
        .execution
        .map_range(config.num_sequences, |i| generate_synthetic_sequence(config, i, root))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = SynthManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        config: config.clone(),
        sequences,
    };
    manifest.write(&root.join(MANIFEST_FILE))?;
    Ok(manifest)
}
