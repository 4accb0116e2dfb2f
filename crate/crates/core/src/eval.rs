//! Cross-validation harness: stratified folds, per-fold training and
//! scoring, hidden-size sweeps and the reports they produce.
//!
//! Percentages are printed with two decimals, rounded half-up.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::mlp::{init_model, train, LabeledSample, MlpError, MlpModel, TrainingConfig, NUM_CLASSES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("fold count {0} must be at least 2")]
    InvalidFoldCount(usize),
    #[error("class {label} has {count} samples, fewer than {folds} folds")]
    TooFewSamples {
        label: usize,
        count: usize,
        folds: usize,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no hidden sizes to sweep")]
    EmptySweep,
    #[error("{truths} true labels but {predictions} predictions")]
    LengthMismatch { truths: usize, predictions: usize },
    #[error("label {0} outside 0..=9")]
    LabelOutOfRange(usize),
    #[error(transparent)]
    Training(#[from] MlpError),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    provenance: Vec<String>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sample: LabeledSample, source: impl Into<String>) {
        self.samples.push(sample);
        self.provenance.push(source.into());
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for s in &self.samples {
            counts[s.label] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> Vec<LabeledSample> {
        indices.iter().map(|&i| self.samples[i].clone()).collect()
    }
}

impl FromIterator<(LabeledSample, String)> for Dataset {
    fn from_iter<I: IntoIterator<Item = (LabeledSample, String)>>(iter: I) -> Self {
        let mut d = Dataset::new();
        for (s, p) in iter {
            d.push(s, p);
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    fold_count: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    /// Fold index of every sample.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Stratified `k`-way split. Each class is shuffled by a ChaCha8 generator
/// seeded with `seed`, then dealt round-robin; the dealing position carries
/// over between classes so fold sizes stay within one of each other.
pub fn make_folds(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidFoldCount(k));
    }
    if labels.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let classes = labels.iter().max().unwrap() + 1;
    let mut by_class = vec![Vec::new(); classes];
    for (i, &label) in labels.iter().enumerate() {
        by_class[label].push(i);
    }
    for (label, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(EvalError::TooFewSamples {
                label,
                count: members.len(),
                folds: k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; labels.len()];
    let mut dealt = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignments[i] = dealt % k;
            dealt += 1;
        }
    }
    Ok(FoldPlan {
        fold_count: k,
        assignments,
    })
}

pub trait Classifier {
    fn classify(&self, features: &[f64]) -> usize;
}

impl Classifier for MlpModel {
    fn classify(&self, features: &[f64]) -> usize {
        self.predict(features)
    }
}

/// Something that can be trained on one fold's training samples.
pub trait Learner: Sync {
    type Model: Classifier + Send;

    fn fit(&self, train: &[LabeledSample], fold: usize) -> Result<Self::Model, EvalError>;
}

/// Trains a fresh network per fold, seeded with `config.seed + fold`.
#[derive(Debug, Clone)]
pub struct MlpLearner {
    pub config: TrainingConfig,
}

impl MlpLearner {
    pub fn fold_config(&self, fold: usize) -> TrainingConfig {
        TrainingConfig {
            seed: self.config.seed.wrapping_add(fold as u64),
            ..self.config.clone()
        }
    }
}

impl Learner for MlpLearner {
    type Model = MlpModel;

    fn fit(&self, train_set: &[LabeledSample], fold: usize) -> Result<MlpModel, EvalError> {
        let config = self.fold_config(fold);
        let (model, _) = train(init_model(&config), train_set, &config)?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self {
            counts: [[0; NUM_CLASSES]; NUM_CLASSES],
        }
    }
}

impl ConfusionMatrix {
    /// Rows are true labels, columns predictions.
    pub fn get(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth][predicted]
    }

    pub fn rows(&self) -> &[[usize; NUM_CLASSES]; NUM_CLASSES] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
    }

    /// Fixed-width table: a `true\pred` header row, then one row per true
    /// label; the label column is 9 wide and each count 6 wide.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:<9}", "true\\pred");
        for j in 0..NUM_CLASSES {
            write!(s, "{j:>6}").unwrap();
        }
        s.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            write!(s, "{i:>9}").unwrap();
            for c in row {
                write!(s, "{c:>6}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

pub fn confusion_matrix(truths: &[usize], predictions: &[usize]) -> Result<ConfusionMatrix, EvalError> {
    if truths.len() != predictions.len() {
        return Err(EvalError::LengthMismatch {
            truths: truths.len(),
            predictions: predictions.len(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (&t, &p) in truths.iter().zip(predictions) {
        if t >= NUM_CLASSES {
            return Err(EvalError::LabelOutOfRange(t));
        }
        if p >= NUM_CLASSES {
            return Err(EvalError::LabelOutOfRange(p));
        }
        m.counts[t][p] += 1;
    }
    Ok(m)
}

/// `x` rounded half-up to two decimals, in hundredths.
pub fn hundredths(x: f64) -> i64 {
    // The nudge keeps exact halves such as 96.665 from landing just below
    // the midpoint after the multiplication.
    (x * 100.0 + 0.5 + 1e-9).floor() as i64
}

pub fn format_percent(x: f64) -> String {
    let h = hundredths(x);
    let sign = if h < 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", h.abs() / 100, h.abs() % 100)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub train_size: usize,
    pub test_size: usize,
    /// Percentage of the fold's test samples classified correctly.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    /// Pooled over every fold's test set.
    pub confusion: ConfusionMatrix,
    pub config: Option<TrainingConfig>,
}

impl EvaluationReport {
    pub fn per_fold_accuracy(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    /// `fold,train,test,accuracy` with one row per fold and a final `mean` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("fold,train,test,accuracy\n");
        for (i, f) in self.folds.iter().enumerate() {
            writeln!(
                s,
                "{},{},{},{}",
                i + 1,
                f.train_size,
                f.test_size,
                format_percent(f.accuracy)
            )
            .unwrap();
        }
        writeln!(s, "mean,,,{}", format_percent(self.mean_accuracy)).unwrap();
        s
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Trains one model per fold (in parallel) and scores it on the held-out fold.
pub fn cross_validate_with<L: Learner>(
    data: &Dataset,
    learner: &L,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, EvalError> {
    let plan = make_folds(&data.labels(), k, seed)?;
    let outcomes = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train_idx = plan.train_indices(fold);
            let test_idx = plan.test_indices(fold);
            let model = learner.fit(&data.subset(&train_idx), fold)?;
            let truths: Vec<usize> = test_idx.iter().map(|&i| data.samples()[i].label).collect();
            let preds: Vec<usize> = test_idx
                .iter()
                .map(|&i| model.classify(&data.samples()[i].features))
                .collect();
            let confusion = confusion_matrix(&truths, &preds)?;
            let fold_result = FoldResult {
                train_size: train_idx.len(),
                test_size: test_idx.len(),
                accuracy: 100.0 * confusion.trace() as f64 / test_idx.len() as f64,
            };
            Ok((fold_result, confusion))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut confusion = ConfusionMatrix::default();
    let mut folds = Vec::with_capacity(k);
    for (f, c) in outcomes {
        confusion.merge(&c);
        folds.push(f);
    }
    let accuracies: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    Ok(EvaluationReport {
        mean_accuracy: mean(&accuracies),
        folds,
        confusion,
        config: None,
    })
}

/// `k`-fold cross-validation of the network described by `config`; the fold
/// split uses `config.seed`.
pub fn cross_validate(
    data: &Dataset,
    config: &TrainingConfig,
    k: usize,
) -> Result<EvaluationReport, EvalError> {
    config.validate()?;
    let learner = MlpLearner {
        config: config.clone(),
    };
    let mut report = cross_validate_with(data, &learner, k, config.seed)?;
    report.config = Some(config.clone());
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub hidden_size: usize,
    pub per_fold: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Hidden size with the best mean accuracy as printed (two decimals);
    /// ties go to the smaller size.
    pub fn selected(&self) -> Option<usize> {
        self.rows
            .iter()
            .max_by(|a, b| {
                hundredths(a.mean)
                    .cmp(&hundredths(b.mean))
                    .then(b.hidden_size.cmp(&a.hidden_size))
            })
            .map(|r| r.hidden_size)
    }

    /// `size,fold1,…,foldK,mean`, one row per hidden size.
    pub fn to_csv(&self) -> String {
        let folds = self.rows.first().map_or(0, |r| r.per_fold.len());
        let mut s = String::from("size");
        for i in 1..=folds {
            write!(s, ",fold{i}").unwrap();
        }
        s.push_str(",mean\n");
        for row in &self.rows {
            write!(s, "{}", row.hidden_size).unwrap();
            for acc in &row.per_fold {
                write!(s, ",{}", format_percent(*acc)).unwrap();
            }
            writeln!(s, ",{}", format_percent(row.mean)).unwrap();
        }
        s
    }
}

/// Runs `evaluate` for every hidden size, in order.
pub fn sweep_with<F>(sizes: &[usize], mut evaluate: F) -> Result<SweepTable, EvalError>
where
    F: FnMut(usize) -> Result<EvaluationReport, EvalError>,
{
    if sizes.is_empty() {
        return Err(EvalError::EmptySweep);
    }
    let rows = sizes
        .iter()
        .map(|&size| {
            let report = evaluate(size)?;
            Ok(SweepRow {
                hidden_size: size,
                per_fold: report.per_fold_accuracy(),
                mean: report.mean_accuracy,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(SweepTable { rows })
}

pub fn sweep_hidden(
    data: &Dataset,
    sizes: &[usize],
    config: &TrainingConfig,
    k: usize,
) -> Result<SweepTable, EvalError> {
    sweep_with(sizes, |hidden_size| {
        let cfg = TrainingConfig {
            hidden_size,
            ..config.clone()
        };
        cross_validate(data, &cfg, k)
    })
}
