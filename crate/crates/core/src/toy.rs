//! Procedurally drawn glyphs standing in for a scanned digit corpus.
//!
//! Ten archetypes are drawn on the 32×32 raster, shifted by up to two
//! pixels in each direction and corrupted by independent pixel flips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eval::Dataset;
use crate::features::extract_features;
use crate::imgproc::{BinaryImage, CANONICAL_SIZE};
use crate::mlp::{LabeledSample, NUM_CLASSES};

pub const MAX_JITTER: i32 = 2;

pub const GLYPH_NAMES: [&str; NUM_CLASSES] = [
    "vertical-bar",
    "horizontal-bar",
    "diagonal",
    "anti-diagonal",
    "ring",
    "cross",
    "l-shape",
    "t-shape",
    "disc",
    "zig-zag",
];

fn glyph_contains(class: usize, r: i32, c: i32) -> bool {
    let inside = (4..=27).contains(&r) && (4..=27).contains(&c);
    let vbar = (14..=17).contains(&c);
    let hbar = (14..=17).contains(&r);
    let (fr, fc) = (f64::from(r) - 15.5, f64::from(c) - 15.5);
    let dist = (fr * fr + fc * fc).sqrt();
    inside
        && match class {
            0 => vbar,
            1 => hbar,
            2 => (r - c).abs() <= 1,
            3 => (r + c - 31).abs() <= 1,
            4 => (8.0..=11.5).contains(&dist),
            5 => vbar || hbar,
            6 => (6..=9).contains(&c) || ((24..=27).contains(&r) && (6..=25).contains(&c)),
            7 => r <= 7 || vbar,
            8 => dist <= 10.5,
            9 => r <= 7 || r >= 24 || (r + c - 31).abs() <= 1,
            _ => panic!("glyph class {class} out of range"),
        }
}

/// Clean glyph of `class`, shifted down by `dy` and right by `dx`.
pub fn render_glyph(class: usize, dy: i32, dx: i32) -> BinaryImage {
    let n = CANONICAL_SIZE as i32;
    let mut img = BinaryImage::blank(CANONICAL_SIZE, CANONICAL_SIZE);
    for r in 0..n {
        for c in 0..n {
            if glyph_contains(class, r - dy, c - dx) {
                img.set(r as usize, c as usize, true);
            }
        }
    }
    img
}

#[derive(Debug, Clone)]
pub struct ToyGlyph {
    pub image: BinaryImage,
    pub label: usize,
    pub jitter: (i32, i32),
    pub tag: String,
}

/// `per_class` noisy glyphs of each class, interleaved by class. All
/// randomness comes from one ChaCha8 generator seeded with `seed`.
pub fn make_toy_images(per_class: usize, noise: f64, seed: u64) -> Vec<ToyGlyph> {
    assert!(per_class >= 1, "per_class must be at least 1");
    assert!((0.0..1.0).contains(&noise), "noise rate must lie in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * NUM_CLASSES);
    for i in 0..per_class {
        for label in 0..NUM_CLASSES {
            let dy = rng.random_range(-MAX_JITTER..=MAX_JITTER);
            let dx = rng.random_range(-MAX_JITTER..=MAX_JITTER);
            let mut image = render_glyph(label, dy, dx);
            if noise > 0.0 {
                for r in 0..CANONICAL_SIZE {
                    for c in 0..CANONICAL_SIZE {
                        if rng.random_bool(noise) {
                            image.set(r, c, !image.get(r, c));
                        }
                    }
                }
            }
            out.push(ToyGlyph {
                image,
                label,
                jitter: (dy, dx),
                tag: format!("toy:{}:{i}:dy={dy}:dx={dx}", GLYPH_NAMES[label]),
            });
        }
    }
    out
}

/// The toy glyphs run through the feature extractor.
pub fn make_toy_dataset(per_class: usize, noise: f64, seed: u64) -> Dataset {
    let glyphs = make_toy_images(per_class, noise, seed);
    glyphs
        .into_par_iter()
        .map(|g| {
            let features = extract_features(&g.image);
            (LabeledSample::from_features(&features, g.label), g.tag)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
