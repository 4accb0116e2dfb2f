//! Binary model files.
//!
//! Little-endian layout: magic `MLP1`, format version `u32 = 1`, layer
//! count `u32 = 3`, the three layer sizes as `u32`, then the hidden and
//! output weight matrices, row-major `f64`, bias column last. Nothing may
//! follow the last weight.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Layer, MlpModel};

pub const MAGIC: [u8; 4] = *b"MLP1";
pub const FORMAT_VERSION: u32 = 1;
const LAYER_COUNT: u32 = 3;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes {0:?}, not a model file")]
    BadMagic([u8; 4]),
    #[error("unsupported model format version {0}")]
    VersionMismatch(u32),
    #[error("model stream truncated while reading {0}")]
    TruncatedStream(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0} unexpected bytes after the last weight")]
    TrailingBytes(usize),
    #[error("model contains a non-finite weight")]
    NonFinite,
}

pub fn save_model<W: Write>(model: &MlpModel, mut out: W) -> Result<(), ModelIoError> {
    if !model.is_finite() {
        return Err(ModelIoError::NonFinite);
    }
    let mut buf = Vec::with_capacity(24 + 8 * model.parameter_count());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&LAYER_COUNT.to_le_bytes());
    for size in model.layer_sizes() {
        let size = u32::try_from(size)
            .map_err(|_| ModelIoError::ShapeMismatch(format!("layer size {size} exceeds u32")))?;
        buf.extend_from_slice(&size.to_le_bytes());
    }
    for w in model.parameters() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take<const K: usize>(&mut self, what: &'static str) -> Result<[u8; K], ModelIoError> {
        if self.bytes.len() < K {
            return Err(ModelIoError::TruncatedStream(what));
        }
        let (head, rest) = self.bytes.split_at(K);
        self.bytes = rest;
        Ok(head.try_into().unwrap())
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, ModelIoError> {
        self.take::<4>(what).map(u32::from_le_bytes)
    }

    fn matrix(&mut self, len: usize, what: &'static str) -> Result<Vec<f64>, ModelIoError> {
        (0..len)
            .map(|_| {
                let w = f64::from_le_bytes(self.take::<8>(what)?);
                if w.is_finite() {
                    Ok(w)
                } else {
                    Err(ModelIoError::NonFinite)
                }
            })
            .collect()
    }
}

pub fn load_model<R: Read>(mut input: R) -> Result<MlpModel, ModelIoError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut r = Reader { bytes: &bytes };

    let magic = r.take::<4>("magic")?;
    if magic != MAGIC {
        return Err(ModelIoError::BadMagic(magic));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(ModelIoError::VersionMismatch(version));
    }
    let layers = r.u32("layer count")?;
    if layers != LAYER_COUNT {
        return Err(ModelIoError::ShapeMismatch(format!(
            "expected {LAYER_COUNT} layers, found {layers}"
        )));
    }
    let mut sizes = [0usize; 3];
    for s in &mut sizes {
        *s = r.u32("layer sizes")? as usize;
        if *s == 0 {
            return Err(ModelIoError::ShapeMismatch("zero-sized layer".into()));
        }
    }
    let [n_in, n_hid, n_out] = sizes;
    let hidden = r.matrix(n_hid * (n_in + 1), "hidden weights")?;
    let output = r.matrix(n_out * (n_hid + 1), "output weights")?;
    if !r.bytes.is_empty() {
        return Err(ModelIoError::TrailingBytes(r.bytes.len()));
    }
    let hidden = Layer::from_weights(n_in, n_hid, hidden).expect("length checked");
    let output = Layer::from_weights(n_hid, n_out, output).expect("length checked");
    Ok(MlpModel::from_layers(hidden, output).expect("sizes checked"))
}

pub fn save_model_file(model: &MlpModel, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    save_model(model, io::BufWriter::new(fs::File::create(path)?))
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<MlpModel, ModelIoError> {
    load_model(io::BufReader::new(fs::File::open(path)?))
}
