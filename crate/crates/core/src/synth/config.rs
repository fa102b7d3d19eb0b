use crate::exec::Execution;
use serde::{Deserialize, Serialize};

/// Image-plane motion applied uniformly to the scene. Frame `k` sits at
/// offset `offset(k)` from frame 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    #[default]
    Static,
    /// Constant velocity, pixels per frame.
    Translation { dx: f64, dy: f64 },
    /// `amplitude * sin(2πk / period_frames)` on each axis.
    Sinusoidal {
        amplitude_x: f64,
        amplitude_y: f64,
        period_frames: f64,
    },
}

impl Motion {
    pub fn offset(&self, frame: usize) -> (f64, f64) {
        let k = frame as f64;
        match *self {
            Motion::Static => (0.0, 0.0),
            Motion::Translation { dx, dy } => (k * dx, k * dy),
            Motion::Sinusoidal {
                amplitude_x,
                amplitude_y,
                period_frames,
            } => {
                let s = (std::f64::consts::TAU * k / period_frames).sin();
                (amplitude_x * s, amplitude_y * s)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StereoSetup {
    pub baseline_m: f64,
    pub focal_px: f64,
    /// Defaults to the image centre.
    pub principal_left: Option<[f64; 2]>,
    /// Defaults to the left principal point shifted 12 px to the left.
    pub principal_right: Option<[f64; 2]>,
    /// Explicit per-blob depths, cycled. Empty means random within
    /// `depth_range_m`.
    pub depths_m: Vec<f64>,
    pub depth_range_m: [f64; 2],
}

impl Default for StereoSetup {
    fn default() -> Self {
        Self {
            baseline_m: 0.004,
            focal_px: 1000.0,
            principal_left: None,
            principal_right: None,
            depths_m: Vec::new(),
            depth_range_m: [0.04, 0.08],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub num_sequences: usize,
    pub frames_per_sequence: usize,
    pub blobs: usize,
    /// Range of the Gaussian IR blob standard deviation, pixels.
    pub blob_sigma: [f64; 2],
    /// Radius of the textured disk drawn around each point in the visible
    /// frames.
    pub disk_radius: f64,
    /// Minimum centre distance between any two blobs, pixels.
    pub min_separation: f64,
    /// Minimum row distance between any two blobs, pixels.
    pub min_row_separation: f64,
    /// Distance every point keeps from the image border over the clip.
    pub margin: f64,
    pub motion: Motion,
    pub seed: u64,
    pub stereo: StereoSetup,
    /// Standard deviation of Gaussian noise added to visible frames.
    pub noise: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub fps: f64,
    /// Session ids assigned to sequences in turn.
    pub sessions: Vec<String>,
    /// Extra small blobs present in the start IR image only.
    pub spurious_start_blobs: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_sequences: 3,
            frames_per_sequence: 10,
            blobs: 5,
            blob_sigma: [2.5, 3.5],
            disk_radius: 16.0,
            min_separation: 48.0,
            min_row_separation: 8.0,
            margin: 72.0,
            motion: Motion::Static,
            seed: 0,
            stereo: StereoSetup::default(),
            noise: 0.0,
            image_width: crate::dataset::NOMINAL_WIDTH,
            image_height: crate::dataset::NOMINAL_HEIGHT,
            fps: 30.0,
            sessions: vec!["02".into(), "03".into()],
            spurious_start_blobs: 0,
            execution: Execution::default(),
        }
    }
}

impl SynthConfig {
    pub fn principal_left(&self) -> [f64; 2] {
        self.stereo
            .principal_left
            .unwrap_or([(self.image_width / 2) as f64, (self.image_height / 2) as f64])
    }

    pub fn principal_right(&self) -> [f64; 2] {
        self.stereo.principal_right.unwrap_or_else(|| {
            let [cx, cy] = self.principal_left();
            [cx - 12.0, cy]
        })
    }

    pub fn validate(&self) -> Result<(), String> {
        let s = &self.stereo;
        if self.frames_per_sequence == 0 {
            return Err("frames_per_sequence must be at least 1".into());
        }
        if self.image_width < 32 || self.image_height < 32 {
            return Err("image must be at least 32x32".into());
        }
        if !(s.baseline_m > 0.0 && s.focal_px > 0.0) {
            return Err("baseline and focal length must be positive".into());
        }
        if s.depths_m.iter().any(|&z| !(z > 0.0)) {
            return Err("depths must be positive".into());
        }
        if s.depths_m.is_empty() && !(s.depth_range_m[0] > 0.0 && s.depth_range_m[1] >= s.depth_range_m[0]) {
            return Err(format!("invalid depth range {:?}", s.depth_range_m));
        }
        if !(self.blob_sigma[0] > 0.0 && self.blob_sigma[1] >= self.blob_sigma[0]) {
            return Err(format!("invalid blob sigma range {:?}", self.blob_sigma));
        }
        if !(self.fps > 0.0) {
            return Err("fps must be positive".into());
        }
        if self.sessions.is_empty() {
            return Err("at least one session id is required".into());
        }
        if let Motion::Sinusoidal { period_frames, .. } = self.motion {
            if !(period_frames > 0.0) {
                return Err("sinusoid period must be positive".into());
            }
        }
        Ok(())
    }
}
