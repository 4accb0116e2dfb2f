//! Portable graymap (PGM) reading and writing, ASCII `P2` and binary `P5`.
//!
//! Only 8-bit graymaps are accepted (`maxval <= 255`). Samples of a file with
//! a smaller maxval are rescaled to the full 0..=255 range.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::imgproc::{GrayImage, ImageError};

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a PGM file (magic {0:?})")]
    BadMagic(String),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported maxval {0} (must be 1..=255)")]
    MaxVal(u32),
    #[error("sample value {value} exceeds maxval {maxval}")]
    SampleRange { value: u32, maxval: u32 },
    #[error("pixel data truncated: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("unexpected data after pixel samples")]
    TrailingData,
    #[error(transparent)]
    Image(#[from] ImageError),
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PgmError> {
    parse_pgm(&fs::read(path)?)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .token()
            .ok_or_else(|| PgmError::Header(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                PgmError::Header(format!("bad {what} {:?}", String::from_utf8_lossy(tok)))
            })
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let magic = bytes.get(..2).unwrap_or(bytes);
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::MaxVal(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PgmError::Header(format!("zero dimension {width}x{height}")));
    }
    let expected = width * height;

    let raw: Vec<u32> = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        let start = cur.pos + 1;
        let data = bytes.get(start..).unwrap_or(&[]);
        if data.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: data.len(),
            });
        }
        if data.len() > expected {
            return Err(PgmError::TrailingData);
        }
        data.iter().map(|&b| u32::from(b)).collect()
    } else {
        let mut samples = Vec::with_capacity(expected);
        while let Some(tok) = cur.token() {
            if samples.len() == expected {
                return Err(PgmError::TrailingData);
            }
            let value = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| {
                    PgmError::Header(format!("bad sample {:?}", String::from_utf8_lossy(tok)))
                })?;
            samples.push(value);
        }
        if samples.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: samples.len(),
            });
        }
        samples
    };

    let pixels = raw
        .into_iter()
        .map(|value| {
            if value > maxval {
                Err(PgmError::SampleRange { value, maxval })
            } else {
                Ok(((value * 255 + maxval / 2) / maxval) as u8)
            }
        })
        .collect::<Result<Vec<u8>, _>>()?;
    Ok(GrayImage::new(height, width, pixels)?)
}

/// Encodes as binary `P5` with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> io::Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    file.write_all(&encode_pgm(img))?;
    file.flush()
}
