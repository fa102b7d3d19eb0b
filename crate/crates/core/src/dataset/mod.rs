//! Benchmark layout on disk.
//!
//! ```text
//! <root>/<session>/<sequence>/
//!     calib.json
//!     left/starticg.png  left/endicg.png
//!     left/segmentation/startim.png  left/segmentation/endim.png
//!     left/frames/<start>_<end>_ms/000000.png ...
//!     right/starticg.png right/endicg.png
//!     right/frames/<start>_<end>_ms/000000.png ...
//! ```
//!
//! Video containers (`frames/<start>_<end>_ms.mp4`) are not decoded here;
//! they have to be extracted into a frame directory of the same stem first.

mod calib;
mod filename;
mod stream;

pub use calib::{
    load_calibration, CalibrationError, CameraCalibration, PinholeIntrinsics, NOMINAL_HEIGHT,
    NOMINAL_WIDTH,
};
pub use filename::{format_video_name, parse_video_filename, FilenameError, VideoTimestamps};
pub use stream::{Frame, FrameStream, StreamError};

use crate::exec::Execution;
use crate::imaging::{extract_segments, BinaryMask, LumaImage};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CALIB_FILE: &str = "calib.json";
pub const START_IR: &str = "starticg.png";
pub const END_IR: &str = "endicg.png";
pub const START_MASK: &str = "segmentation/startim.png";
pub const END_MASK: &str = "segmentation/endim.png";
pub const FRAMES_DIR: &str = "frames";

pub const IN_VIVO_SESSIONS: [&str; 5] = ["03", "04", "07", "08", "11"];
pub const EX_VIVO_SESSIONS: [&str; 4] = ["02", "05", "06", "09"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset root not found: {0}")]
    RootNotFound(PathBuf),
    #[error("missing mandatory file {0}")]
    MissingFile(PathBuf),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("{0}")]
    Layout(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    InVivo,
    ExVivo,
    Unknown,
}

impl SequenceKind {
    pub fn from_session(session: &str) -> Self {
        if IN_VIVO_SESSIONS.contains(&session) {
            SequenceKind::InVivo
        } else if EX_VIVO_SESSIONS.contains(&session) {
            SequenceKind::ExVivo
        } else {
            SequenceKind::Unknown
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eye {
    Left,
    Right,
}

impl Eye {
    pub fn dir_name(self) -> &'static str {
        match self {
            Eye::Left => "left",
            Eye::Right => "right",
        }
    }
}

/// Loaded description of one clip. Images are referenced by path and
/// decoded on demand.
#[derive(Clone, Debug)]
pub struct Sequence {
    pub session_id: String,
    /// Path of the sequence directory relative to the dataset root.
    pub sequence_id: String,
    pub kind: SequenceKind,
    pub dir: PathBuf,
    pub calibration: CameraCalibration,
    pub left_frames: Vec<PathBuf>,
    pub right_frames: Vec<PathBuf>,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Set when the name carried only a start time.
    pub end_ms_derived: bool,
    pub frame_size: (u32, u32),
    /// Number of start-mask segments in the left eye.
    pub point_count: usize,
}

impl Sequence {
    pub fn frame_count(&self) -> usize {
        self.left_frames.len()
    }

    pub fn duration_s(&self) -> f64 {
        (self.end_ms - self.start_ms) as f64 / 1000.0
    }

    pub fn is_nominal_size(&self) -> bool {
        self.frame_size == (NOMINAL_WIDTH, NOMINAL_HEIGHT)
    }

    pub fn eye_dir(&self, eye: Eye) -> PathBuf {
        self.dir.join(eye.dir_name())
    }

    pub fn start_ir(&self, eye: Eye) -> PathBuf {
        self.eye_dir(eye).join(START_IR)
    }

    /// The right eye may use `endim.png` instead of `endicg.png`.
    pub fn end_ir(&self, eye: Eye) -> PathBuf {
        let canonical = self.eye_dir(eye).join(END_IR);
        if eye == Eye::Right && !canonical.exists() {
            let alt = self.eye_dir(eye).join("endim.png");
            if alt.exists() {
                return alt;
            }
        }
        canonical
    }

    pub fn start_mask(&self) -> PathBuf {
        self.eye_dir(Eye::Left).join(START_MASK)
    }

    pub fn end_mask(&self) -> PathBuf {
        self.eye_dir(Eye::Left).join(END_MASK)
    }

    pub fn gt_path(&self) -> PathBuf {
        self.dir.join(crate::groundtruth::GT_FILE)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedSequence {
    pub path: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub sequences: usize,
    pub total_points: usize,
    pub mean_clip_s: f64,
    pub total_frames: usize,
    pub sessions: Vec<String>,
    pub in_vivo_sessions: usize,
    pub ex_vivo_sessions: usize,
    pub in_vivo_sequences: usize,
    pub ex_vivo_sequences: usize,
    pub all_frames_nominal: bool,
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub root: PathBuf,
    pub sequences: Vec<Sequence>,
    pub skipped: Vec<SkippedSequence>,
    pub summary: DatasetSummary,
}

#[derive(Clone, Debug)]
pub struct LoaderConfig {
    /// Minimum segment area when counting labelled points.
    pub min_area: usize,
    /// Frame rate used to derive an end time from a single-group name.
    pub fps: f64,
    pub execution: Execution,
}

impl Default for LoaderConfig {
    fn default() -> Self {
        Self {
            min_area: crate::groundtruth::GtConfig::default().min_area,
            fps: 30.0,
            execution: Execution::default(),
        }
    }
}

/// Discovers and loads every sequence under `root`. Sequences with missing
/// or broken assets are skipped and reported; they do not abort the load.
pub fn load_dataset(root: &Path, config: &LoaderConfig) -> Result<Dataset, DatasetError> {
    if !root.is_dir() {
        return Err(DatasetError::RootNotFound(root.to_owned()));
    }
    let dirs = discover_sequences(root);
    let results = config.execution.map(&dirs, |dir| load_sequence(root, dir, config));

    let mut sequences = Vec::new();
    let mut skipped = Vec::new();
    for (dir, result) in dirs.iter().zip(results) {
        match result {
            Ok(seq) => sequences.push(seq),
            Err(e) => skipped.push(SkippedSequence {
                path: relative_id(root, dir),
                reason: e.to_string(),
            }),
        }
    }
    let summary = summarize(&sequences, skipped.len());
    Ok(Dataset {
        root: root.to_owned(),
        sequences,
        skipped,
        summary,
    })
}

fn summarize(sequences: &[Sequence], skipped: usize) -> DatasetSummary {
    let sessions: BTreeSet<String> = sequences.iter().map(|s| s.session_id.clone()).collect();
    let count_kind = |k| sequences.iter().filter(|s| s.kind == k).count();
    let mean_clip_s = if sequences.is_empty() {
        0.0
    } else {
        sequences.iter().map(Sequence::duration_s).sum::<f64>() / sequences.len() as f64
    };
    DatasetSummary {
        sequences: sequences.len(),
        total_points: sequences.iter().map(|s| s.point_count).sum(),
        mean_clip_s,
        total_frames: sequences.iter().map(Sequence::frame_count).sum(),
        in_vivo_sessions: sessions
            .iter()
            .filter(|s| SequenceKind::from_session(s) == SequenceKind::InVivo)
            .count(),
        ex_vivo_sessions: sessions
            .iter()
            .filter(|s| SequenceKind::from_session(s) == SequenceKind::ExVivo)
            .count(),
        sessions: sessions.into_iter().collect(),
        in_vivo_sequences: count_kind(SequenceKind::InVivo),
        ex_vivo_sequences: count_kind(SequenceKind::ExVivo),
        all_frames_nominal: sequences.iter().all(Sequence::is_nominal_size),
        skipped,
    }
}

fn is_sequence_dir(dir: &Path) -> bool {
    dir.join(CALIB_FILE).is_file() || (dir.join("left").is_dir() && dir.join("right").is_dir())
}

fn discover_sequences(root: &Path) -> Vec<PathBuf> {
    let mut found = Vec::new();
    let mut walker = walkdir::WalkDir::new(root)
        .max_depth(4)
        .sort_by_file_name()
        .into_iter();
    while let Some(entry) = walker.next() {
        let Ok(entry) = entry else { continue };
        if !entry.file_type().is_dir() {
            continue;
        }
        if is_sequence_dir(entry.path()) {
            found.push(entry.path().to_owned());
            walker.skip_current_dir();
        }
    }
    found
}

fn relative_id(root: &Path, dir: &Path) -> String {
    let rel = dir.strip_prefix(root).unwrap_or(dir);
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    if parts.is_empty() {
        ".".into()
    } else {
        parts.join("/")
    }
}

fn require(path: PathBuf) -> Result<PathBuf, DatasetError> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(DatasetError::MissingFile(path))
    }
}

pub(crate) fn read_luma(path: &Path) -> Result<LumaImage, DatasetError> {
    let img = image::open(path).map_err(|e| DatasetError::Image {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    Ok(LumaImage::from_gray8(&img.to_luma8()))
}

pub(crate) fn read_mask(path: &Path) -> Result<BinaryMask, DatasetError> {
    let img = image::open(path).map_err(|e| DatasetError::Image {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    BinaryMask::from_gray8(&img.to_luma8()).map_err(|e| DatasetError::Image {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn image_size(path: &Path) -> Result<(u32, u32), DatasetError> {
    image::image_dimensions(path).map_err(|e| DatasetError::Image {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

struct FrameSet {
    timestamps: VideoTimestamps,
    frames: Vec<PathBuf>,
}

fn locate_frames(eye_dir: &Path) -> Result<FrameSet, DatasetError> {
    let frames_dir = eye_dir.join(FRAMES_DIR);
    if !frames_dir.is_dir() {
        return Err(DatasetError::MissingFile(frames_dir));
    }
    let mut dirs = Vec::new();
    let mut containers = Vec::new();
    for entry in std::fs::read_dir(&frames_dir).map_err(|e| DatasetError::Layout(e.to_string()))? {
        let entry = entry.map_err(|e| DatasetError::Layout(e.to_string()))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Ok(ts) = parse_video_filename(&name) else { continue };
        if entry.path().is_dir() {
            dirs.push((name, ts, entry.path()));
        } else {
            containers.push(name);
        }
    }
    dirs.sort_by(|a, b| a.0.cmp(&b.0));
    match dirs.len() {
        1 => {}
        0 => {
            return Err(match containers.first() {
                Some(name) => DatasetError::Layout(format!(
                    "video container {} must be extracted into a frame directory first \
                     (e.g. ffmpeg -i {name} {}/%06d.png)",
                    frames_dir.join(name).display(),
                    name.rsplit_once('.').map_or(name.as_str(), |(stem, _)| stem),
                )),
                None => DatasetError::MissingFile(frames_dir.join("<start>_<end>_ms")),
            })
        }
        n => {
            return Err(DatasetError::Layout(format!(
                "{n} frame directories in {}; expected one",
                frames_dir.display()
            )))
        }
    }
    let (_, timestamps, dir) = dirs.remove(0);
    let mut frames: Vec<(u64, String, PathBuf)> = std::fs::read_dir(&dir)
        .map_err(|e| DatasetError::Layout(e.to_string()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .map(|p| {
            let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            (stem.parse::<u64>().unwrap_or(u64::MAX), stem, p)
        })
        .collect();
    frames.sort();
    Ok(FrameSet {
        timestamps,
        frames: frames.into_iter().map(|(_, _, p)| p).collect(),
    })
}

fn load_sequence(root: &Path, dir: &Path, config: &LoaderConfig) -> Result<Sequence, DatasetError> {
    let sequence_id = relative_id(root, dir);
    let session_id = sequence_id.split('/').next().unwrap_or_default().to_owned();
    let calibration = load_calibration(&require(dir.join(CALIB_FILE))?)?;

    let left = dir.join("left");
    let right = dir.join("right");
    let start_mask_path = require(left.join(START_MASK))?;
    require(left.join(END_MASK))?;
    require(left.join(START_IR))?;
    require(left.join(END_IR))?;
    require(right.join(START_IR))?;
    if !right.join(END_IR).is_file() {
        require(right.join("endim.png"))?;
    }

    let left_set = locate_frames(&left)?;
    let right_set = locate_frames(&right)?;
    if left_set.frames.len() != right_set.frames.len() {
        return Err(DatasetError::Invariant(format!(
            "left stream has {} frames, right stream has {}",
            left_set.frames.len(),
            right_set.frames.len()
        )));
    }
    if left_set.frames.is_empty() {
        return Err(DatasetError::Invariant("frame stream is empty".into()));
    }

    let start_ms = left_set.timestamps.start_ms;
    let (end_ms, end_ms_derived) = match left_set.timestamps.end_ms {
        Some(end) => (end, false),
        None => {
            let duration = (left_set.frames.len() as f64 * 1000.0 / config.fps).round() as u64;
            (start_ms + duration, true)
        }
    };
    if end_ms <= start_ms {
        return Err(DatasetError::Invariant(format!(
            "end time {end_ms} ms is not after start time {start_ms} ms"
        )));
    }

    let frame_size = image_size(&left_set.frames[0])?;
    let expected = (calibration.image_width, calibration.image_height);
    if frame_size != expected {
        return Err(DatasetError::Invariant(format!(
            "frames are {}x{} but calibration declares {}x{}",
            frame_size.0, frame_size.1, expected.0, expected.1
        )));
    }

    let start_mask = read_mask(&start_mask_path)?;
    if (start_mask.width() as u32, start_mask.height() as u32) != frame_size {
        return Err(DatasetError::Invariant(format!(
            "start mask is {}x{}, frames are {}x{}",
            start_mask.width(),
            start_mask.height(),
            frame_size.0,
            frame_size.1
        )));
    }
    let point_count = extract_segments(&start_mask, config.min_area).len();

    Ok(Sequence {
        kind: SequenceKind::from_session(&session_id),
        session_id,
        sequence_id,
        dir: dir.to_owned(),
        calibration,
        left_frames: left_set.frames,
        right_frames: right_set.frames,
        start_ms,
        end_ms,
        end_ms_derived,
        frame_size,
        point_count,
    })
}

/// Opens the forward-only stream for one eye.
pub fn open_frame_stream(sequence: &Sequence, eye: Eye) -> Result<FrameStream, DatasetError> {
    if sequence.left_frames.len() != sequence.right_frames.len() {
        return Err(DatasetError::Invariant(format!(
            "left stream has {} frames, right stream has {}",
            sequence.left_frames.len(),
            sequence.right_frames.len()
        )));
    }
    let paths = match eye {
        Eye::Left => sequence.left_frames.clone(),
        Eye::Right => sequence.right_frames.clone(),
    };
    Ok(FrameStream::from_files(paths))
}

/// Full audit of one loaded sequence: every frame header, the IR images and
/// both masks. Returns a list of problems (empty when clean).
pub fn audit_sequence(sequence: &Sequence) -> Vec<String> {
    let mut issues = Vec::new();
    let expected = sequence.frame_size;
    if !sequence.is_nominal_size() {
        issues.push(format!(
            "non-nominal frame size {}x{} (synthetic fixtures only)",
            expected.0, expected.1
        ));
    }
    for path in sequence.left_frames.iter().chain(&sequence.right_frames) {
        match image_size(path) {
            Ok(size) if size == expected => {}
            Ok(size) => issues.push(format!("{}: {}x{}", path.display(), size.0, size.1)),
            Err(e) => issues.push(e.to_string()),
        }
    }
    for path in [
        sequence.start_ir(Eye::Left),
        sequence.end_ir(Eye::Left),
        sequence.start_ir(Eye::Right),
        sequence.end_ir(Eye::Right),
    ] {
        match image_size(&path) {
            Ok(size) if size == expected => {}
            Ok(size) => issues.push(format!("{}: {}x{}", path.display(), size.0, size.1)),
            Err(e) => issues.push(e.to_string()),
        }
    }
    for path in [sequence.start_mask(), sequence.end_mask()] {
        if let Err(e) = read_mask(&path) {
            issues.push(e.to_string());
        }
    }
    issues
}
