//! Cross-validation and sweep reporting with stubbed learners.

use std::collections::BTreeSet;

use digitrec::eval::{
    cross_validate, cross_validate_with, format_percent, make_folds, sweep_with, Classifier,
    Dataset, EvalError, EvaluationReport, FoldResult, Learner,
};
use digitrec::mlp::{LabeledSample, TrainingConfig};
use digitrec::toy::make_toy_dataset;
use digitrec::ConfusionMatrix;

/// Samples whose first feature is a unique id.
fn id_dataset(per_class: usize) -> Dataset {
    (0..per_class * 10)
        .map(|i| (LabeledSample::new(vec![i as f64], i % 10), format!("stub:{i}")))
        .collect()
}

/// Knows every label; deliberately gets the lowest-id `errors[fold]` of
/// the held-out samples wrong.
struct ScriptedLearner {
    labels: Vec<usize>,
    errors: Vec<usize>,
}

struct ScriptedModel {
    labels: Vec<usize>,
    wrong: BTreeSet<usize>,
}

impl Classifier for ScriptedModel {
    fn classify(&self, features: &[f64]) -> usize {
        let id = features[0] as usize;
        if self.wrong.contains(&id) {
            (self.labels[id] + 1) % 10
        } else {
            self.labels[id]
        }
    }
}

impl Learner for ScriptedLearner {
    type Model = ScriptedModel;

    fn fit(&self, train: &[LabeledSample], fold: usize) -> Result<ScriptedModel, EvalError> {
        let seen: BTreeSet<usize> = train.iter().map(|s| s.features[0] as usize).collect();
        let wrong = (0..self.labels.len())
            .filter(|id| !seen.contains(id))
            .take(self.errors[fold])
            .collect();
        Ok(ScriptedModel {
            labels: self.labels.clone(),
            wrong,
        })
    }
}

#[test]
fn three_folds_of_six_thousand() {
    let data = id_dataset(600);
    let learner = ScriptedLearner { labels: data.labels(), errors: vec![67, 66, 67] };
    let report = cross_validate_with(&data, &learner, 3, 1).unwrap();
    for f in &report.folds {
        assert_eq!((f.train_size, f.test_size), (4000, 2000));
    }
    assert_eq!(
        report.folds.iter().map(|f| format_percent(f.accuracy)).collect::<Vec<_>>(),
        ["96.65", "96.70", "96.65"]
    );
    assert_eq!(format_percent(report.mean_accuracy), "96.67");
    assert_eq!(report.confusion.total(), 6000);
    assert_eq!(report.confusion.trace(), 6000 - 200);
    let csv = report.to_csv();
    assert_eq!(
        csv,
        "fold,train,test,accuracy\n1,4000,2000,96.65\n2,4000,2000,96.70\n3,4000,2000,96.65\nmean,,,96.67\n"
    );
}

#[test]
fn oracle_learner_is_perfect() {
    let data = id_dataset(9);
    let learner = ScriptedLearner { labels: data.labels(), errors: vec![0; 3] };
    let report = cross_validate_with(&data, &learner, 3, 5).unwrap();
    assert!(report.per_fold_accuracy().iter().all(|&a| a == 100.0));
    let c = report.confusion;
    assert_eq!(c.trace(), c.total());
    assert_eq!(c.total(), 90);
}

#[test]
fn too_few_samples_propagates() {
    let data = id_dataset(2);
    let learner = ScriptedLearner { labels: data.labels(), errors: vec![0; 3] };
    assert!(matches!(
        cross_validate_with(&data, &learner, 3, 0),
        Err(EvalError::TooFewSamples { folds: 3, .. })
    ));
}

fn canned(per_fold: &[f64]) -> EvaluationReport {
    EvaluationReport {
        folds: per_fold
            .iter()
            .map(|&accuracy| FoldResult { train_size: 4000, test_size: 2000, accuracy })
            .collect(),
        mean_accuracy: per_fold.iter().sum::<f64>() / per_fold.len() as f64,
        confusion: ConfusionMatrix::default(),
        config: None,
    }
}

#[test]
fn sweep_over_reference_table_picks_65() {
    let table = [
        (25, [95.5, 96.1, 95.65]),
        (30, [96.1, 96.05, 96.0]),
        (35, [95.85, 95.9, 96.15]),
        (40, [96.2, 96.15, 96.65]),
        (45, [96.3, 96.05, 96.25]),
        (50, [96.05, 95.95, 96.6]),
        (55, [95.95, 96.1, 96.7]),
        (60, [96.1, 96.0, 96.8]),
        (65, [96.65, 96.7, 96.65]),
        (70, [96.15, 96.1, 96.6]),
    ];
    let sizes: Vec<usize> = table.iter().map(|r| r.0).collect();
    let sweep = sweep_with(&sizes, |size| {
        let row = table.iter().find(|r| r.0 == size).unwrap();
        Ok(canned(&row.1))
    })
    .unwrap();
    assert_eq!(sweep.rows.len(), 10);
    assert_eq!(sweep.selected(), Some(65));
    let csv = sweep.to_csv();
    assert_eq!(csv.lines().next(), Some("size,fold1,fold2,fold3,mean"));
    assert!(csv.contains("\n65,96.65,96.70,96.65,96.67\n"));
    assert!(csv.contains("\n25,95.50,96.10,95.65,95.75\n"));
}

#[test]
fn sweep_tie_goes_to_smaller_size() {
    let sweep = sweep_with(&[40, 30], |_| Ok(canned(&[90.0, 92.0, 91.0]))).unwrap();
    assert_eq!(sweep.selected(), Some(30));
    assert_eq!(sweep_with(&[], |_| Ok(canned(&[1.0]))), Err(EvalError::EmptySweep));
}

#[test]
fn cross_validation_is_reproducible() {
    let data = make_toy_dataset(6, 0.05, 21);
    let config = TrainingConfig { hidden_size: 12, max_epochs: 15, ..Default::default() };
    let a = cross_validate(&data, &config, 3).unwrap();
    let b = cross_validate(&data, &config, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.confusion.total(), data.len());
    let mean = a.per_fold_accuracy().iter().sum::<f64>() / 3.0;
    assert_eq!(a.mean_accuracy, mean);
    assert_eq!(a.config, Some(config));
}

#[test]
fn folds_are_seeded() {
    let labels: Vec<usize> = (0..300).map(|i| i % 10).collect();
    assert_eq!(make_folds(&labels, 3, 8), make_folds(&labels, 3, 8));
    assert_ne!(make_folds(&labels, 3, 8), make_folds(&labels, 3, 9));
}
