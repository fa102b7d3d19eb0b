use super::BinaryMask;
use crate::point::Point2;

/// One 8-connected component of a mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub pixels: Vec<(u32, u32)>,
    /// Unweighted mean of pixel coordinates.
    pub centroid: Point2,
}

impl Segment {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn centroids(&self) -> Vec<Point2> {
        self.segments.iter().map(|s| s.centroid).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Segment> {
        self.segments.iter()
    }
}

/// Labels 8-connected components, drops those smaller than `min_area`, and
/// orders the rest by `(centroid.y, centroid.x)`.
pub fn extract_segments(mask: &BinaryMask, min_area: usize) -> SegmentSet {
    let (w, h) = (mask.width(), mask.height());
    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    let mut segments = Vec::new();

    for start in 0..w * h {
        if visited[start] || !mask.bits()[start] {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(idx) = stack.pop() {
            let (x, y) = (idx % w, idx / w);
            pixels.push((x as u32, y as u32));
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let n = ny as usize * w + nx as usize;
                    if !visited[n] && mask.bits()[n] {
                        visited[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        if pixels.len() >= min_area {
            pixels.sort_unstable_by_key(|&(x, y)| (y, x));
            let n = pixels.len() as f64;
            let (sx, sy) = pixels.iter().fold((0.0, 0.0), |(ax, ay), &(x, y)| {
                (ax + f64::from(x), ay + f64::from(y))
            });
            segments.push(Segment {
                pixels,
                centroid: Point2::new(sx / n, sy / n),
            });
        }
    }

    segments.sort_by(|a, b| {
        a.centroid
            .y
            .total_cmp(&b.centroid.y)
            .then(a.centroid.x.total_cmp(&b.centroid.x))
    });
    SegmentSet { segments }
}
