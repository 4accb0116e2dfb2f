use super::octant::{octant_of, Octant};
use super::shadow::assert_canonical;
use crate::imgproc::{BinaryImage, CANONICAL_SIZE};

pub const CENTROID_LEN: usize = Octant::COUNT * 2;

/// Mean (row, col) of the ink in each octant, divided by 31. An octant
/// without ink reports (0, 0).
pub fn centroid_features(img: &BinaryImage) -> [f64; CENTROID_LEN] {
    assert_canonical(img);
    let n = CANONICAL_SIZE;
    let mut sums = [(0usize, 0usize, 0usize); Octant::COUNT];
    for (i, _) in img.pixels().iter().enumerate().filter(|(_, &ink)| ink) {
        let (row, col) = (i / n, i % n);
        let s = &mut sums[octant_of(row, col).index()];
        s.0 += row;
        s.1 += col;
        s.2 += 1;
    }
    let max_index = (n - 1) as f64;
    let mut out = [0.0; CENTROID_LEN];
    for (k, &(rows, cols, count)) in sums.iter().enumerate() {
        if count > 0 {
            out[2 * k] = rows as f64 / count as f64 / max_index;
            out[2 * k + 1] = cols as f64 / count as f64 / max_index;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_pixel() {
        let mut img = BinaryImage::blank(32, 32);
        img.set(0, 31, true);
        let f = centroid_features(&img);
        let mut expected = [0.0; 16];
        expected[3] = 1.0;
        assert_eq!(f, expected);
    }

    #[test]
    fn blank_is_sentinel() {
        assert_eq!(centroid_features(&BinaryImage::blank(32, 32)), [0.0; 16]);
    }
}
