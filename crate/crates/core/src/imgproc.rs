//! Grayscale and binary rasters, and the pipeline that turns an arbitrary
//! digit scan into the canonical 32×32 binary image.
//!
//! Intensities follow the usual graymap convention: 0 is black, 255 is
//! white. Ink is assumed darker than paper unless `invert` is set.

use thiserror::Error;

/// Side length of the canonical raster consumed by the feature extractors.
pub const CANONICAL_SIZE: usize = 32;

/// Global threshold used when nothing else is configured.
pub const DEFAULT_THRESHOLD: u8 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("image has no foreground pixels")]
    NoForeground,
    #[error("invalid dimensions {height}x{width} for {len} pixels")]
    Dimensions {
        height: usize,
        width: usize,
        len: usize,
    },
    #[error("binary pixel value {0} is not 0 or 1")]
    NotBinary(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(height, width, pixels.len())?;
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    /// Copies the rectangle described by `bbox` into a new image.
    pub fn crop(&self, bbox: &BoundingBox) -> GrayImage {
        let mut pixels = Vec::with_capacity(bbox.height() * bbox.width());
        for row in bbox.row_min..=bbox.row_max {
            let start = row * self.width;
            pixels.extend_from_slice(&self.pixels[start + bbox.col_min..=start + bbox.col_max]);
        }
        GrayImage {
            height: bbox.height(),
            width: bbox.width(),
            pixels,
        }
    }
}

/// Row-major raster where `true` marks an ink pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    height: usize,
    width: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(height: usize, width: usize, pixels: Vec<bool>) -> Result<Self, ImageError> {
        check_dims(height, width, pixels.len())?;
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    /// Builds an image from 0/1 values; anything else is rejected.
    pub fn from_bits(height: usize, width: usize, bits: &[u8]) -> Result<Self, ImageError> {
        check_dims(height, width, bits.len())?;
        let pixels = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(ImageError::NotBinary(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    /// Parses rows of `'#'`/`'1'` (ink) and `'.'`/`'0'` (paper). Handy in tests.
    pub fn from_ascii(rows: &[&str]) -> Result<Self, ImageError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut pixels = Vec::with_capacity(height * width);
        for row in rows {
            if row.len() != width {
                return Err(ImageError::Dimensions {
                    height,
                    width,
                    len: row.len(),
                });
            }
            pixels.extend(row.bytes().map(|b| b == b'#' || b == b'1'));
        }
        Self::new(height, width, pixels)
    }

    pub fn blank(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        Self {
            height,
            width,
            pixels: vec![false; height * width],
        }
    }

    pub fn full(height: usize, width: usize) -> Self {
        let mut img = Self::blank(height, width);
        img.pixels.fill(true);
        img
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, ink: bool) {
        self.pixels[row * self.width + col] = ink;
    }

    pub fn count_foreground(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn rotate_180(&self) -> BinaryImage {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        BinaryImage {
            height: self.height,
            width: self.width,
            pixels,
        }
    }

    /// Gray rendering with ink at 0 and paper at 255.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            height: self.height,
            width: self.width,
            pixels: self
                .pixels
                .iter()
                .map(|&ink| if ink { 0 } else { 255 })
                .collect(),
        }
    }
}

fn check_dims(height: usize, width: usize, len: usize) -> Result<(), ImageError> {
    if height == 0 || width == 0 || height.checked_mul(width) != Some(len) {
        return Err(ImageError::Dimensions { height, width, len });
    }
    Ok(())
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub row_min: usize,
    pub row_max: usize,
    pub col_min: usize,
    pub col_max: usize,
}

impl BoundingBox {
    pub fn height(&self) -> usize {
        self.row_max - self.row_min + 1
    }

    pub fn width(&self) -> usize {
        self.col_max - self.col_min + 1
    }

    pub fn contains(&self, other: &BoundingBox) -> bool {
        self.row_min <= other.row_min
            && self.row_max >= other.row_max
            && self.col_min <= other.col_min
            && self.col_max >= other.col_max
    }
}

#[inline]
fn is_ink(intensity: f64, threshold: u8, invert: bool) -> bool {
    if invert {
        intensity >= f64::from(threshold)
    } else {
        intensity < f64::from(threshold)
    }
}

/// Dark-ink polarity: `intensity < threshold` is ink. With `invert`, `intensity >= threshold` is.
pub fn binarize(img: &GrayImage, threshold: u8, invert: bool) -> BinaryImage {
    BinaryImage {
        height: img.height,
        width: img.width,
        pixels: img
            .pixels
            .iter()
            .map(|&p| is_ink(f64::from(p), threshold, invert))
            .collect(),
    }
}

pub fn minimal_bounding_box(img: &BinaryImage) -> Result<BoundingBox, ImageError> {
    let mut bbox: Option<BoundingBox> = None;
    for row in 0..img.height {
        for col in 0..img.width {
            if !img.get(row, col) {
                continue;
            }
            bbox = Some(match bbox {
                None => BoundingBox {
                    row_min: row,
                    row_max: row,
                    col_min: col,
                    col_max: col,
                },
                Some(b) => BoundingBox {
                    row_min: b.row_min.min(row),
                    row_max: b.row_max.max(row),
                    col_min: b.col_min.min(col),
                    col_max: b.col_max.max(col),
                },
            });
        }
    }
    bbox.ok_or(ImageError::NoForeground)
}

/// Otsu's threshold, expressed for the strict-less-than ink rule: the dark
/// class is every intensity `< t`. Returns [`DEFAULT_THRESHOLD`] when the
/// histogram admits no split (a constant image).
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &n)| i as f64 * n as f64)
        .sum();

    let mut best: Option<(f64, usize)> = None;
    let mut weight_dark = 0.0;
    let mut sum_dark = 0.0;
    // Splitting after intensity 255 leaves the light class empty, so stop at 254.
    for (level, &count) in hist.iter().enumerate().take(255) {
        weight_dark += count as f64;
        sum_dark += level as f64 * count as f64;
        let weight_light = total - weight_dark;
        if weight_dark == 0.0 || weight_light == 0.0 {
            continue;
        }
        let mean_dark = sum_dark / weight_dark;
        let mean_light = (sum_all - sum_dark) / weight_light;
        let between = weight_dark * weight_light * (mean_dark - mean_light).powi(2);
        if best.is_none_or(|(v, _)| between > v) {
            best = Some((between, level));
        }
    }
    match best {
        Some((_, level)) => (level + 1) as u8,
        None => DEFAULT_THRESHOLD,
    }
}

/// How a gray image is split into ink and paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Fixed(u8),
    Otsu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binarization {
    pub mode: ThresholdMode,
    pub invert: bool,
}

impl Default for Binarization {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::Fixed(DEFAULT_THRESHOLD),
            invert: false,
        }
    }
}

impl Binarization {
    pub fn threshold_for(&self, img: &GrayImage) -> u8 {
        match self.mode {
            ThresholdMode::Fixed(t) => t,
            ThresholdMode::Otsu => otsu_threshold(img),
        }
    }

    pub fn normalize(&self, img: &GrayImage) -> Result<BinaryImage, ImageError> {
        normalize_image(img, self.threshold_for(img), self.invert)
    }
}

/// Bilinear resampling with pixel-center alignment. Source coordinates are
/// clamped to the image, so an equal-size resize is the identity and the
/// first/last output rows and columns sample the source borders exactly
/// when upscaling.
pub fn resize_bilinear(img: &GrayImage, out_height: usize, out_width: usize) -> Vec<f64> {
    let rows: Vec<(usize, usize, f64)> = (0..out_height)
        .map(|i| sample_axis(i, img.height, out_height))
        .collect();
    let cols: Vec<(usize, usize, f64)> = (0..out_width)
        .map(|j| sample_axis(j, img.width, out_width))
        .collect();

    let mut out = Vec::with_capacity(out_height * out_width);
    for &(y0, y1, fy) in &rows {
        for &(x0, x1, fx) in &cols {
            let p00 = f64::from(img.get(y0, x0));
            let p01 = f64::from(img.get(y0, x1));
            let p10 = f64::from(img.get(y1, x0));
            let p11 = f64::from(img.get(y1, x1));
            let top = p00 + (p01 - p00) * fx;
            let bottom = p10 + (p11 - p10) * fx;
            out.push(top + (bottom - top) * fy);
        }
    }
    out
}

fn sample_axis(dst: usize, src_len: usize, dst_len: usize) -> (usize, usize, f64) {
    let scale = src_len as f64 / dst_len as f64;
    let pos = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(src_len - 1);
    (lo, hi, pos - lo as f64)
}

/// Crop to the ink's bounding box, stretch the gray crop to 32×32 and
/// threshold again. The interpolated intensities are compared unrounded.
pub fn normalize_image(
    img: &GrayImage,
    threshold: u8,
    invert: bool,
) -> Result<BinaryImage, ImageError> {
    let provisional = binarize(img, threshold, invert);
    let bbox = minimal_bounding_box(&provisional)?;
    let crop = img.crop(&bbox);
    let scaled = resize_bilinear(&crop, CANONICAL_SIZE, CANONICAL_SIZE);
    Ok(BinaryImage {
        height: CANONICAL_SIZE,
        width: CANONICAL_SIZE,
        pixels: scaled
            .into_iter()
            .map(|v| is_ink(v, threshold, invert))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(h: usize, w: usize, px: Vec<u8>) -> GrayImage {
        GrayImage::new(h, w, px).unwrap()
    }

    #[test]
    fn binarize_boundary_rule() {
        let img = gray(1, 3, vec![0, 255, 128]);
        let b = binarize(&img, 128, false);
        assert_eq!(b.pixels(), &[true, false, false]);
        let inv = binarize(&img, 128, true);
        assert_eq!(inv.pixels(), &[false, true, true]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert_eq!(
            BinaryImage::from_bits(1, 2, &[0, 2]),
            Err(ImageError::NotBinary(2))
        );
    }

    #[test]
    fn bounding_box_examples() {
        let mut img = BinaryImage::blank(12, 12);
        img.set(5, 7, true);
        assert_eq!(
            minimal_bounding_box(&img).unwrap(),
            BoundingBox {
                row_min: 5,
                row_max: 5,
                col_min: 7,
                col_max: 7
            }
        );
        let full = BinaryImage::full(10, 10);
        assert_eq!(
            minimal_bounding_box(&full).unwrap(),
            BoundingBox {
                row_min: 0,
                row_max: 9,
                col_min: 0,
                col_max: 9
            }
        );
        assert_eq!(
            minimal_bounding_box(&BinaryImage::blank(4, 4)),
            Err(ImageError::NoForeground)
        );
    }

    #[test]
    fn uniform_dark_normalizes_to_full() {
        let img = GrayImage::filled(64, 40, 10).unwrap();
        let out = normalize_image(&img, 128, false).unwrap();
        assert_eq!(out, BinaryImage::full(32, 32));
    }

    #[test]
    fn single_dark_pixel_fills_canonical_raster() {
        let mut img = GrayImage::filled(100, 100, 255).unwrap();
        img.set(40, 61, 0);
        let out = normalize_image(&img, 128, false).unwrap();
        assert_eq!(out, BinaryImage::full(32, 32));
    }

    #[test]
    fn blank_scan_reports_no_foreground() {
        let img = GrayImage::filled(20, 20, 255).unwrap();
        assert_eq!(
            normalize_image(&img, 128, false),
            Err(ImageError::NoForeground)
        );
    }

    #[test]
    fn equal_size_resize_is_identity() {
        let px: Vec<u8> = (0..32 * 32).map(|i| (i * 37 % 256) as u8).collect();
        let img = gray(32, 32, px.clone());
        let out = resize_bilinear(&img, 32, 32);
        let expected: Vec<f64> = px.iter().map(|&p| f64::from(p)).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn otsu_splits_bimodal_histogram() {
        let mut px = vec![30u8; 50];
        px.extend(vec![220u8; 50]);
        let t = otsu_threshold(&gray(10, 10, px));
        assert!(t > 30 && t <= 220, "threshold {t}");
        assert_eq!(otsu_threshold(&GrayImage::filled(3, 3, 90).unwrap()), 128);
    }

    #[test]
    fn inverted_polarity_normalizes() {
        let mut img = GrayImage::filled(10, 10, 0).unwrap();
        img.set(2, 3, 255);
        img.set(6, 8, 255);
        let out = normalize_image(&img, 128, true).unwrap();
        assert!(out.get(0, 0) && out.get(31, 31));
        assert!(!out.get(0, 31));
    }

    fn binary_image(max: usize) -> impl Strategy<Value = BinaryImage> {
        (1..=max, 1..=max).prop_flat_map(|(h, w)| {
            proptest::collection::vec(any::<bool>(), h * w)
                .prop_map(move |px| BinaryImage::new(h, w, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn polarity_complement(px in proptest::collection::vec(any::<u8>(), 1..200), t in any::<u8>()) {
            let img = gray(1, px.len(), px.clone());
            let dark = binarize(&img, t, false);
            let light = binarize(&img, t, true);
            for (i, &p) in px.iter().enumerate() {
                prop_assert_ne!(dark.pixels()[i], light.pixels()[i]);
                prop_assert_eq!(dark.pixels()[i], p < t);
            }
        }

        #[test]
        fn removing_ink_never_grows_the_box(img in binary_image(12), pick in any::<usize>()) {
            let Ok(before) = minimal_bounding_box(&img) else { return Ok(()); };
            let ink: Vec<usize> = (0..img.pixels().len()).filter(|&i| img.pixels()[i]).collect();
            let idx = ink[pick % ink.len()];
            let mut smaller = img.clone();
            smaller.set(idx / img.width(), idx % img.width(), false);
            if let Ok(after) = minimal_bounding_box(&smaller) {
                prop_assert!(before.contains(&after));
            }
        }

        #[test]
        fn canonical_form_is_idempotent(img in binary_image(32)) {
            // Embed the random pattern so its ink touches all four sides of a 32×32 raster.
            let mut canon = BinaryImage::blank(32, 32);
            for r in 0..img.height() {
                for c in 0..img.width() {
                    canon.set(r, c, img.get(r, c));
                }
            }
            for i in 0..32 {
                canon.set(0, i, true);
                canon.set(i, 0, true);
                canon.set(31, i, i % 3 == 0);
                canon.set(i, 31, i % 5 == 1);
            }
            let out = normalize_image(&canon.to_gray(), 128, false).unwrap();
            prop_assert_eq!(out, canon);
        }

        #[test]
        fn normalized_ink_touches_every_border(
            h in 2usize..=32, w in 2usize..=32,
            seed in proptest::collection::vec(any::<bool>(), 32 * 32),
            pad in 0usize..8,
        ) {
            let mut bin = BinaryImage::blank(h + 2 * pad, w + 2 * pad);
            for r in 0..h {
                for c in 0..w {
                    bin.set(r + pad, c + pad, seed[r * 32 + c]);
                }
            }
            // Guarantee a 2×2-or-larger ink extent.
            bin.set(pad, pad, true);
            bin.set(pad + h - 1, pad + w - 1, true);
            let out = normalize_image(&bin.to_gray(), 128, false).unwrap();
            prop_assert!((0..32).any(|c| out.get(0, c)));
            prop_assert!((0..32).any(|c| out.get(31, c)));
            prop_assert!((0..32).any(|r| out.get(r, 0)));
            prop_assert!((0..32).any(|r| out.get(r, 31)));
        }
    }
}
