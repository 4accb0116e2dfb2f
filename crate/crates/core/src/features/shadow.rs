//! Shadow features: the projection of each octant's ink onto the three
//! sides of its triangle.

use std::sync::OnceLock;

use super::octant::{octant_of, Octant};
use crate::imgproc::{BinaryImage, CANONICAL_SIZE};

const N: usize = CANONICAL_SIZE;
pub const CELLS_PER_SIDE: usize = 16;
pub const SHADOW_LEN: usize = Octant::COUNT * 3;

/// The three sides of an octant triangle, in feature order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Half of an edge of the raster.
    Perimeter,
    /// From the center to the midpoint of a raster edge.
    CenterLine,
    /// From the center to a raster corner.
    Diagonal,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Perimeter, Side::CenterLine, Side::Diagonal];
}

/// Unit steps for angles 0°, 45°, … 315°.
const DIRS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (1.0, 1.0),
    (0.0, 1.0),
    (-1.0, 1.0),
    (-1.0, 0.0),
    (-1.0, -1.0),
    (0.0, -1.0),
    (1.0, -1.0),
];

/// Endpoints `(a, b)` of a side, in center-origin coordinates (x right, y up).
pub fn side_endpoints(octant: Octant, side: Side) -> ((f64, f64), (f64, f64)) {
    let k = octant.index();
    let (center_dir, diag_dir) = if k % 2 == 0 { (k, k + 1) } else { (k + 1, k) };
    let half = N as f64 / 2.0;
    let scale = |d: usize| (DIRS[d % 8].0 * half, DIRS[d % 8].1 * half);
    let mid = scale(center_dir);
    let corner = scale(diag_dir);
    match side {
        Side::Perimeter => (mid, corner),
        Side::CenterLine => ((0.0, 0.0), mid),
        Side::Diagonal => ((0.0, 0.0), corner),
    }
}

/// Cell of `side` hit by the perpendicular dropped from the center of pixel `(row, col)`.
pub fn projection_cell(octant: Octant, side: Side, row: usize, col: usize) -> usize {
    let x = col as f64 + 0.5 - N as f64 / 2.0;
    let y = N as f64 / 2.0 - (row as f64 + 0.5);
    let ((ax, ay), (bx, by)) = side_endpoints(octant, side);
    let (ux, uy) = (bx - ax, by - ay);
    let t = ((x - ax) * ux + (y - ay) * uy) / (ux * ux + uy * uy);
    ((t * CELLS_PER_SIDE as f64).floor().max(0.0) as usize).min(CELLS_PER_SIDE - 1)
}

struct Geometry {
    /// Per pixel: the cell hit on each side of the pixel's own octant.
    cells: Vec<[u8; 3]>,
    /// Per octant and side: how many cells the octant can shadow at all.
    reach: [[u32; 3]; Octant::COUNT],
}

fn geometry() -> &'static Geometry {
    static GEOMETRY: OnceLock<Geometry> = OnceLock::new();
    GEOMETRY.get_or_init(|| {
        let mut cells = Vec::with_capacity(N * N);
        let mut masks = [[0u32; 3]; Octant::COUNT];
        for row in 0..N {
            for col in 0..N {
                let oct = octant_of(row, col);
                let mut hit = [0u8; 3];
                for (s, side) in Side::ALL.iter().enumerate() {
                    let cell = projection_cell(oct, *side, row, col);
                    hit[s] = cell as u8;
                    masks[oct.index()][s] |= 1 << cell;
                }
                cells.push(hit);
            }
        }
        let reach = masks.map(|m| m.map(u32::count_ones));
        Geometry { cells, reach }
    })
}

/// Number of cells of `side` that the octant's own pixels can cover. The
/// triangles are not all equally wide at their tips, so this is 15 or 16.
pub fn max_shadow_cells(octant: Octant, side: Side) -> u32 {
    let s = Side::ALL.iter().position(|&x| x == side).unwrap();
    geometry().reach[octant.index()][s]
}

/// Covered cells divided by the most cells that octant could cover.
/// Layout: octant-major, sides in [`Side::ALL`] order.
pub fn shadow_features(img: &BinaryImage) -> [f64; SHADOW_LEN] {
    assert_canonical(img);
    let geo = geometry();
    let mut masks = [[0u32; 3]; Octant::COUNT];
    for (i, _) in img.pixels().iter().enumerate().filter(|(_, &ink)| ink) {
        let oct = octant_of(i / N, i % N).index();
        for s in 0..3 {
            masks[oct][s] |= 1 << geo.cells[i][s];
        }
    }
    let mut out = [0.0; SHADOW_LEN];
    for k in 0..Octant::COUNT {
        for s in 0..3 {
            out[3 * k + s] = f64::from(masks[k][s].count_ones()) / f64::from(geo.reach[k][s]);
        }
    }
    out
}

pub(crate) fn assert_canonical(img: &BinaryImage) {
    assert!(
        img.height() == N && img.width() == N,
        "expected a {N}x{N} image, got {}x{}",
        img.height(),
        img.width()
    );
}
