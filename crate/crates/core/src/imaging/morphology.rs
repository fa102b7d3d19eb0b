use super::BinaryMask;

/// Erosion with a `(2r+1)²` square element. Pixels outside the image count
/// as background.
pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    let rows = erode_1d(mask, radius, Axis::Horizontal);
    erode_1d(&rows, radius, Axis::Vertical)
}

/// Dilation with a `(2r+1)²` square element, clipped to the image.
pub fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    let rows = dilate_1d(mask, radius, Axis::Horizontal);
    dilate_1d(&rows, radius, Axis::Vertical)
}

/// Opening (erosion then dilation). Panics if `radius` is zero.
pub fn morphological_open(mask: &BinaryMask, radius: usize) -> BinaryMask {
    assert!(radius >= 1, "structuring element radius must be at least 1");
    dilate(&erode(mask, radius), radius)
}

#[derive(Clone, Copy)]
enum Axis {
    Horizontal,
    Vertical,
}

fn lines(mask: &BinaryMask, axis: Axis) -> (usize, usize) {
    match axis {
        Axis::Horizontal => (mask.height(), mask.width()),
        Axis::Vertical => (mask.width(), mask.height()),
    }
}

fn coords(axis: Axis, line: usize, pos: usize) -> (usize, usize) {
    match axis {
        Axis::Horizontal => (pos, line),
        Axis::Vertical => (line, pos),
    }
}

// Sliding-window run counts keep both passes O(n) regardless of radius.
fn erode_1d(mask: &BinaryMask, r: usize, axis: Axis) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width(), mask.height());
    let (n_lines, len) = lines(mask, axis);
    let mut prefix = vec![0usize; len + 1];
    for line in 0..n_lines {
        for pos in 0..len {
            let (x, y) = coords(axis, line, pos);
            prefix[pos + 1] = prefix[pos] + usize::from(mask.get(x, y));
        }
        for pos in r..len.saturating_sub(r) {
            if prefix[pos + r + 1] - prefix[pos - r] == 2 * r + 1 {
                let (x, y) = coords(axis, line, pos);
                out.set(x, y, true);
            }
        }
    }
    out
}

fn dilate_1d(mask: &BinaryMask, r: usize, axis: Axis) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width(), mask.height());
    let (n_lines, len) = lines(mask, axis);
    let mut prefix = vec![0usize; len + 1];
    for line in 0..n_lines {
        for pos in 0..len {
            let (x, y) = coords(axis, line, pos);
            prefix[pos + 1] = prefix[pos] + usize::from(mask.get(x, y));
        }
        for pos in 0..len {
            let lo = pos.saturating_sub(r);
            let hi = (pos + r + 1).min(len);
            if prefix[hi] > prefix[lo] {
                let (x, y) = coords(axis, line, pos);
                out.set(x, y, true);
            }
        }
    }
    out
}
