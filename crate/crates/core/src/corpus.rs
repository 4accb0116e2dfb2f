//! Labeled image directories and feature CSV files.
//!
//! A corpus root holds subdirectories `0` … `9`; every `.pgm`/`.pnm` file
//! inside is one sample of that digit. Files are read in name order.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::eval::Dataset;
use crate::features::{extract_features, FEATURE_LEN};
use crate::imgproc::{Binarization, ImageError};
use crate::mlp::{LabeledSample, NUM_CLASSES};
use crate::pgm::{read_pgm, PgmError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus directory {path}: {source}")]
    Root {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image { path: PathBuf, source: PgmError },
    #[error("feature csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("feature csv row {row}: {message}")]
    CsvRow { row: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    /// No ink under the threshold.
    Blank,
    /// Not a graymap by extension.
    NotAnImage,
}

#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub dataset: Dataset,
    pub skipped: Vec<(PathBuf, SkipReason)>,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("pnm"))
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let entries = fs::read_dir(dir).map_err(|source| CorpusError::Root {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = entries
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| CorpusError::Root {
            path: dir.to_path_buf(),
            source,
        })?;
    paths.sort();
    Ok(paths)
}

/// Reads, normalizes and featurizes every image under `root`.
pub fn load_corpus(root: &Path, binarization: &Binarization) -> Result<LoadedCorpus, CorpusError> {
    let mut files: Vec<(PathBuf, usize)> = Vec::new();
    let mut skipped = Vec::new();
    // Listing the root first gives a clear error for a missing directory.
    read_dir_sorted(root)?;
    for label in 0..NUM_CLASSES {
        let dir = root.join(label.to_string());
        if !dir.is_dir() {
            continue;
        }
        for path in read_dir_sorted(&dir)? {
            if path.is_file() && is_image(&path) {
                files.push((path, label));
            } else if path.is_file() {
                skipped.push((path, SkipReason::NotAnImage));
            }
        }
    }

    let loaded = files
        .par_iter()
        .map(|(path, label)| {
            let gray = read_pgm(path).map_err(|source| CorpusError::Image {
                path: path.clone(),
                source,
            })?;
            match binarization.normalize(&gray) {
                Ok(bin) => Ok(Some(LabeledSample::from_features(&extract_features(&bin), *label))),
                Err(ImageError::NoForeground) => Ok(None),
                Err(e) => Err(CorpusError::Image {
                    path: path.clone(),
                    source: e.into(),
                }),
            }
        })
        .collect::<Result<Vec<_>, CorpusError>>()?;

    let mut dataset = Dataset::new();
    for ((path, _), sample) in files.into_iter().zip(loaded) {
        match sample {
            Some(s) => dataset.push(s, path.display().to_string()),
            None => skipped.push((path, SkipReason::Blank)),
        }
    }
    Ok(LoadedCorpus { dataset, skipped })
}

/// Header `label,f0,…,f75`, one row per sample, shortest round-trip floats.
pub fn write_features_csv<W: Write>(out: W, data: &Dataset) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label".to_string()];
    header.extend((0..FEATURE_LEN).map(|i| format!("f{i}")));
    w.write_record(&header)?;
    for s in data.samples() {
        let mut record = vec![s.label.to_string()];
        record.extend(s.features.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<Dataset, CorpusError> {
    let mut r = csv::Reader::from_reader(input);
    let width = r.headers()?.len();
    if width != FEATURE_LEN + 1 {
        return Err(CorpusError::CsvRow {
            row: 0,
            message: format!("header has {width} columns, expected {}", FEATURE_LEN + 1),
        });
    }
    let mut data = Dataset::new();
    for (i, record) in r.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let bad = |message: String| CorpusError::CsvRow { row, message };
        let label: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad label {:?}", &record[0])))?;
        if label >= NUM_CLASSES {
            return Err(bad(format!("label {label} outside 0..=9")));
        }
        let features = record
            .iter()
            .skip(1)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("bad feature value {v:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        data.push(LabeledSample::new(features, label), format!("csv:{row}"));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::make_toy_dataset;

    #[test]
    fn csv_round_trip() {
        let d = make_toy_dataset(2, 0.1, 5);
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &d).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("label,f0,f1,"));
        assert!(text.lines().next().unwrap().ends_with(",f75"));
        assert_eq!(text.lines().count(), 21);
        let back = read_features_csv(&buf[..]).unwrap();
        assert_eq!(back.samples(), d.samples());
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let mut text = String::from("label");
        for i in 0..76 {
            text.push_str(&format!(",f{i}"));
        }
        text.push('\n');
        let good_row = format!("3{}\n", ",0.5".repeat(76));
        assert_eq!(read_features_csv(format!("{text}{good_row}").as_bytes()).unwrap().len(), 1);
        let bad_label = format!("{text}12{}\n", ",0.5".repeat(76));
        assert!(matches!(
            read_features_csv(bad_label.as_bytes()),
            Err(CorpusError::CsvRow { row: 1, .. })
        ));
        let bad_value = format!("{text}1,x{}\n", ",0.5".repeat(75));
        assert!(read_features_csv(bad_value.as_bytes()).is_err());
        assert!(read_features_csv("label,f0\n1,0.2\n".as_bytes()).is_err());
    }
}
