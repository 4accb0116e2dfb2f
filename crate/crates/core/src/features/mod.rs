//! The 76-element feature vector: 24 shadow, 16 octant-centroid and 36
//! longest-run features, all in `[0, 1]`.

mod centroid;
mod longest_run;
mod octant;
mod shadow;

pub use centroid::{centroid_features, CENTROID_LEN};
pub use longest_run::{
    longest_run_features, longest_runs, regions, run_sum, Direction, Region, LONGEST_RUN_LEN,
};
pub use octant::{octant_of, sector_of_point, Octant};
pub use shadow::{
    max_shadow_cells, projection_cell, shadow_features, side_endpoints, Side, CELLS_PER_SIDE,
    SHADOW_LEN,
};

use crate::imgproc::BinaryImage;

pub const FEATURE_LEN: usize = SHADOW_LEN + CENTROID_LEN + LONGEST_RUN_LEN;

/// Offsets of each feature family inside a [`FeatureVector`].
pub const SHADOW_RANGE: std::ops::Range<usize> = 0..SHADOW_LEN;
pub const CENTROID_RANGE: std::ops::Range<usize> = SHADOW_LEN..SHADOW_LEN + CENTROID_LEN;
pub const LONGEST_RUN_RANGE: std::ops::Range<usize> = SHADOW_LEN + CENTROID_LEN..FEATURE_LEN;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector([f64; FEATURE_LEN]);

impl FeatureVector {
    pub fn new(values: [f64; FEATURE_LEN]) -> Self {
        FeatureVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn shadow(&self) -> &[f64] {
        &self.0[SHADOW_RANGE]
    }

    pub fn centroid(&self) -> &[f64] {
        &self.0[CENTROID_RANGE]
    }

    pub fn longest_run(&self) -> &[f64] {
        &self.0[LONGEST_RUN_RANGE]
    }
}

impl TryFrom<&[f64]> for FeatureVector {
    type Error = usize;

    /// Fails with the offending length.
    fn try_from(values: &[f64]) -> Result<Self, usize> {
        values
            .try_into()
            .map(FeatureVector)
            .map_err(|_| values.len())
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Panics unless `img` is 32×32.
pub fn extract_features(img: &BinaryImage) -> FeatureVector {
    let mut out = [0.0; FEATURE_LEN];
    out[SHADOW_RANGE].copy_from_slice(&shadow_features(img));
    out[CENTROID_RANGE].copy_from_slice(&centroid_features(img));
    out[LONGEST_RUN_RANGE].copy_from_slice(&longest_run_features(img));
    FeatureVector(out)
}
