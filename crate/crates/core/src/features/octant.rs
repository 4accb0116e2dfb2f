//! Octant decomposition of the canonical raster.
//!
//! The square is cut by its two center lines and its two main diagonals into
//! eight triangles, numbered counter-clockwise from the one between the east
//! center line and the north-east diagonal. A pixel belongs to the triangle
//! containing its center.
//!
//! Pixel centers never fall on a center line, but the 64 pixels on the main
//! diagonals sit exactly on a dividing line. Along each half-diagonal those
//! pixels are numbered 0 (next to the center) to 15 (the corner); steps 0..4
//! and 12..16 go to the counter-clockwise neighbour, steps 4..12 to the
//! clockwise one. Every octant ends up with 128 pixels, the partition is
//! invariant under quarter turns, and the odd octants reach both ends of
//! their diagonal.

use std::sync::OnceLock;

use crate::imgproc::CANONICAL_SIZE;

const N: usize = CANONICAL_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Octant(u8);

impl Octant {
    pub const COUNT: usize = 8;

    pub fn new(index: usize) -> Self {
        assert!(index < Self::COUNT, "octant index {index} out of range");
        Octant(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The octant a half turn away.
    pub fn opposite(self) -> Self {
        Octant((self.0 + 4) % 8)
    }

    pub fn all() -> impl Iterator<Item = Octant> {
        (0..Self::COUNT).map(Self::new)
    }
}

/// Sector of a point relative to the center, angles measured
/// counter-clockwise from east. A point on a dividing line belongs to the
/// lower-indexed of the two adjacent sectors; the center itself is sector 0.
pub fn sector_of_point(dx: f64, dy: f64) -> Octant {
    let index = if dy >= 0.0 {
        if dx >= dy {
            0
        } else if dx >= 0.0 {
            1
        } else if dy >= -dx {
            2
        } else {
            3
        }
    } else if dx < 0.0 && -dx >= -dy {
        4
    } else if dx <= 0.0 {
        5
    } else if -dy >= dx {
        6
    } else {
        7
    };
    Octant(index)
}

fn classify(row: usize, col: usize) -> Octant {
    // Twice the offsets from the raster center; always odd, so exact.
    let dx2 = 2 * col as i32 + 1 - N as i32;
    let dy2 = N as i32 - 1 - 2 * row as i32;
    let sector = sector_of_point(f64::from(dx2), f64::from(dy2));
    if dx2.abs() != dy2.abs() {
        return sector;
    }
    let step = (dx2.unsigned_abs() as usize - 1) / 2;
    let quarter = N / 8;
    if step < quarter || step >= N / 2 - quarter {
        Octant((sector.0 + 1) % 8)
    } else {
        sector
    }
}

fn table() -> &'static [Octant; N * N] {
    static TABLE: OnceLock<[Octant; N * N]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [Octant(0); N * N];
        for (i, slot) in t.iter_mut().enumerate() {
            *slot = classify(i / N, i % N);
        }
        t
    })
}

/// Octant of pixel `(row, col)` of the 32×32 raster. Panics when out of range.
pub fn octant_of(row: usize, col: usize) -> Octant {
    assert!(row < N && col < N, "pixel ({row}, {col}) outside 32x32 raster");
    table()[row * N + col]
}
