use regex::Regex;
use std::sync::LazyLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("video name {0:?} carries no `<ms>_ms` timestamp group")]
pub struct FilenameError(pub String);

/// Capture times encoded in a video (or frame directory) name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VideoTimestamps {
    pub start_ms: u64,
    /// `None` for the single-group form; the end is then derived from the
    /// stream duration.
    pub end_ms: Option<u64>,
}

static NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d+)(?:_(\d+))?_ms(?:\.[A-Za-z0-9]+)?$").expect("valid regex"));

/// Accepts `<start>_<end>_ms[.ext]` and `<start>_ms[.ext]`.
pub fn parse_video_filename(name: &str) -> Result<VideoTimestamps, FilenameError> {
    let caps = NAME
        .captures(name)
        .ok_or_else(|| FilenameError(name.to_owned()))?;
    let parse = |s: &str| s.parse::<u64>().map_err(|_| FilenameError(name.to_owned()));
    Ok(VideoTimestamps {
        start_ms: parse(&caps[1])?,
        end_ms: caps.get(2).map(|m| parse(m.as_str())).transpose()?,
    })
}

/// Canonical two-group name without extension, e.g. `1000_2000_ms`.
pub fn format_video_name(start_ms: u64, end_ms: u64) -> String {
    format!("{start_ms}_{end_ms}_ms")
}
