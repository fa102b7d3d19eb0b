use crate::imaging::LumaImage;
use std::collections::VecDeque;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("failed to decode frame {index} ({path}): {message}")]
pub struct StreamError {
    pub index: usize,
    pub path: String,
    pub message: String,
}

/// One decoded frame and its position in the stream.
#[derive(Clone, Debug)]
pub struct Frame {
    pub index: usize,
    pub image: LumaImage,
}

enum Source {
    Files(Vec<PathBuf>),
    Memory(VecDeque<LumaImage>),
}

/// Forward-only frame source. Each frame is yielded exactly once and there
/// is no way to peek ahead of the cursor.
pub struct FrameStream {
    source: Source,
    frame_count: usize,
    cursor: usize,
}

impl FrameStream {
    pub fn from_files(paths: Vec<PathBuf>) -> Self {
        Self {
            frame_count: paths.len(),
            source: Source::Files(paths),
            cursor: 0,
        }
    }

    pub fn from_images(images: Vec<LumaImage>) -> Self {
        Self {
            frame_count: images.len(),
            source: Source::Memory(images.into()),
            cursor: 0,
        }
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    /// Number of frames handed out so far.
    pub fn frames_yielded(&self) -> usize {
        self.cursor
    }

    /// `Ok(None)` once exhausted, on every subsequent call.
    pub fn next_frame(&mut self) -> Result<Option<Frame>, StreamError> {
        if self.cursor >= self.frame_count {
            return Ok(None);
        }
        let index = self.cursor;
        let image = match &mut self.source {
            Source::Files(paths) => {
                let path = &paths[index];
                let decoded = image::open(path).map_err(|e| StreamError {
                    index,
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                LumaImage::from_gray8(&decoded.to_luma8())
            }
            Source::Memory(queue) => queue.pop_front().expect("count tracks queue length"),
        };
        self.cursor += 1;
        Ok(Some(Frame { index, image }))
    }
}

impl Iterator for FrameStream {
    type Item = Result<Frame, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame().transpose()
    }
}
