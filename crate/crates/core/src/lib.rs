//! Handwritten digit recognition from 76 structural features.
//!
//! Scans are cropped to their ink, stretched to a 32×32 binary raster and
//! described by 24 shadow, 16 octant-centroid and 36 longest-run features.
//! A 76–H–10 logistic MLP trained by online backpropagation with momentum
//! classifies the vectors, and [`eval`] wraps training in stratified
//! cross-validation and hidden-size sweeps.
//!
//! - [`imgproc`]: rasters, thresholding, bounding box, canonical scaling
//! - [`pgm`]: graymap files
//! - [`features`]: the feature extractors
//! - [`mlp`]: the network, its training and model files
//! - [`eval`]: folds, reports, sweeps
//! - [`corpus`]: labeled image directories and feature CSVs
//! - [`toy`]: a synthetic glyph dataset

pub mod corpus;
pub mod eval;
pub mod features;
pub mod imgproc;
pub mod mlp;
pub mod pgm;
pub mod toy;

pub use eval::{
    cross_validate, make_folds, sweep_hidden, ConfusionMatrix, Dataset, EvalError,
    EvaluationReport, FoldPlan, SweepTable,
};
pub use features::{extract_features, FeatureVector, FEATURE_LEN};
pub use imgproc::{
    binarize, minimal_bounding_box, normalize_image, Binarization, BinaryImage, BoundingBox,
    GrayImage, ImageError, ThresholdMode,
};
pub use mlp::{
    init_model, load_model, save_model, train, LabeledSample, MlpError, MlpModel, TrainingConfig,
    NUM_CLASSES,
};
