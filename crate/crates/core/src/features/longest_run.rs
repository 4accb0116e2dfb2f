//! Longest-run features.
//!
//! The image is covered by nine half-size regions whose corners sit on the
//! quarter grid. For each region and each of four scan directions, every
//! scan line crossing the region contributes the length of the longest run
//! of ink on that line that touches the region. Runs are measured over the
//! whole image line, so a bar may extend past the region.

use super::shadow::assert_canonical;
use crate::imgproc::{BinaryImage, CANONICAL_SIZE};

pub const LONGEST_RUN_LEN: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Row,
    Column,
    /// Top-left to bottom-right (constant `col - row`).
    Diagonal,
    /// Top-right to bottom-left (constant `row + col`).
    AntiDiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Row,
        Direction::Column,
        Direction::Diagonal,
        Direction::AntiDiagonal,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub row0: usize,
    pub col0: usize,
    pub height: usize,
    pub width: usize,
}

impl Region {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.row0..self.row0 + self.height).contains(&row)
            && (self.col0..self.col0 + self.width).contains(&col)
    }
}

/// The nine overlapping regions of an `h × w` image: corners at
/// `{0, h/4, 2h/4} × {0, w/4, 2w/4}`, each `h/2 × w/2`, row-major.
pub fn regions(height: usize, width: usize) -> [Region; 9] {
    std::array::from_fn(|i| Region {
        row0: (i / 3) * height / 4,
        col0: (i % 3) * width / 4,
        height: height / 2,
        width: width / 2,
    })
}

/// Cells of one full image line, in scan order.
fn line_cells(img: &BinaryImage, dir: Direction, line: isize) -> Vec<(usize, usize)> {
    let (h, w) = (img.height() as isize, img.width() as isize);
    match dir {
        Direction::Row => (0..w).map(|c| (line as usize, c as usize)).collect(),
        Direction::Column => (0..h).map(|r| (r as usize, line as usize)).collect(),
        Direction::Diagonal => (0..h)
            .filter(|r| (0..w).contains(&(r + line)))
            .map(|r| (r as usize, (r + line) as usize))
            .collect(),
        Direction::AntiDiagonal => (0..h)
            .filter(|r| (0..w).contains(&(line - r)))
            .map(|r| (r as usize, (line - r) as usize))
            .collect(),
    }
}

/// Line identifiers crossing the region, ascending.
fn lines_through(region: &Region, dir: Direction) -> std::ops::RangeInclusive<isize> {
    let (r0, c0) = (region.row0 as isize, region.col0 as isize);
    let (r1, c1) = (r0 + region.height as isize - 1, c0 + region.width as isize - 1);
    match dir {
        Direction::Row => r0..=r1,
        Direction::Column => c0..=c1,
        Direction::Diagonal => (c0 - r1)..=(c1 - r0),
        Direction::AntiDiagonal => (r0 + c0)..=(r1 + c1),
    }
}

/// Longest ink run touching `region` on each scan line that crosses it.
pub fn longest_runs(img: &BinaryImage, region: &Region, dir: Direction) -> Vec<usize> {
    lines_through(region, dir)
        .map(|line| {
            let mut best = 0;
            let mut run = 0;
            let mut touches = false;
            for (r, c) in line_cells(img, dir, line) {
                if img.get(r, c) {
                    run += 1;
                    touches |= region.contains(r, c);
                } else {
                    if touches {
                        best = best.max(run);
                    }
                    run = 0;
                    touches = false;
                }
            }
            if touches {
                best = best.max(run);
            }
            best
        })
        .collect()
}

pub fn run_sum(img: &BinaryImage, region: &Region, dir: Direction) -> usize {
    longest_runs(img, region, dir).iter().sum()
}

/// Nine regions × four directions, each sum divided by `h × w`.
pub fn longest_run_features(img: &BinaryImage) -> [f64; LONGEST_RUN_LEN] {
    assert_canonical(img);
    let area = (CANONICAL_SIZE * CANONICAL_SIZE) as f64;
    let mut out = [0.0; LONGEST_RUN_LEN];
    for (i, region) in regions(CANONICAL_SIZE, CANONICAL_SIZE).iter().enumerate() {
        for (j, dir) in Direction::ALL.iter().enumerate() {
            out[4 * i + j] = run_sum(img, region, *dir) as f64 / area;
        }
    }
    out
}
