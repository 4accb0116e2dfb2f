//! One-hidden-layer feed-forward network of logistic units.
//!
//! Each non-input layer stores a row-major `outputs × (inputs + 1)` weight
//! matrix whose last column is the bias. Input units are pass-through.

mod io;
mod train;

pub use io::{load_model, load_model_file, save_model, save_model_file, ModelIoError};
pub use train::{train, EpochShuffler, TrainingConfig};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{FeatureVector, FEATURE_LEN};

pub const NUM_CLASSES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlpError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("feature vector has {found} values, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: usize) -> Self {
        Self { features, label }
    }

    pub fn from_features(features: &FeatureVector, label: usize) -> Self {
        Self::new(features.as_slice().to_vec(), label)
    }

    /// 1-of-m target: `classes` zeros with a single one at the label.
    pub fn target(&self, classes: usize) -> Vec<f64> {
        let mut t = vec![0.0; classes];
        t[self.label] = 1.0;
        t
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// A fully connected layer; `weights` is `outputs × (inputs + 1)`, bias last.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; outputs * (inputs + 1)],
        }
    }

    pub fn from_weights(inputs: usize, outputs: usize, weights: Vec<f64>) -> Option<Self> {
        (weights.len() == outputs * (inputs + 1)).then_some(Self {
            inputs,
            outputs,
            weights,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// `(rows, cols)` of the weight matrix, bias column included.
    pub fn shape(&self) -> (usize, usize) {
        (self.outputs, self.inputs + 1)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn row(&self, unit: usize) -> &[f64] {
        let cols = self.inputs + 1;
        &self.weights[unit * cols..(unit + 1) * cols]
    }

    fn activate(&self, input: &[f64], out: &mut [f64]) {
        for (unit, o) in out.iter_mut().enumerate() {
            let row = self.row(unit);
            let (w, bias) = row.split_at(self.inputs);
            let z: f64 = w.iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + bias[0];
            *o = sigmoid(z);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    hidden: Layer,
    output: Layer,
}

/// Gradient of the squared error with respect to every weight, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

impl Gradient {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Self {
            hidden: vec![0.0; model.hidden.weights.len()],
            output: vec![0.0; model.output.weights.len()],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.hidden.iter().chain(self.output.iter())
    }
}

/// Hidden and output activations of one forward pass.
#[derive(Debug, Clone)]
pub struct Activations {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

impl MlpModel {
    pub fn from_layers(hidden: Layer, output: Layer) -> Option<Self> {
        (hidden.outputs == output.inputs && hidden.inputs > 0 && hidden.outputs > 0 && output.outputs > 0)
            .then_some(Self { hidden, output })
    }

    pub fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Self {
        Self {
            hidden: Layer::zeros(inputs, hidden),
            output: Layer::zeros(hidden, outputs),
        }
    }

    /// Weights and biases drawn from uniform `[-0.5, 0.5]` by a ChaCha8
    /// generator seeded with `seed`: hidden layer first, row-major.
    pub fn init(inputs: usize, hidden: usize, outputs: usize, seed: u64) -> Self {
        assert!(inputs > 0 && hidden > 0 && outputs > 0, "layer sizes must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Self::zeros(inputs, hidden, outputs);
        for w in model
            .hidden
            .weights
            .iter_mut()
            .chain(model.output.weights.iter_mut())
        {
            *w = rng.random_range(-0.5..=0.5);
        }
        model
    }

    pub fn layer_sizes(&self) -> [usize; 3] {
        [self.hidden.inputs, self.hidden.outputs, self.output.outputs]
    }

    pub fn input_size(&self) -> usize {
        self.hidden.inputs
    }

    pub fn output_size(&self) -> usize {
        self.output.outputs
    }

    pub fn hidden_layer(&self) -> &Layer {
        &self.hidden
    }

    pub fn output_layer(&self) -> &Layer {
        &self.output
    }

    pub fn hidden_layer_mut(&mut self) -> &mut Layer {
        &mut self.hidden
    }

    pub fn output_layer_mut(&mut self) -> &mut Layer {
        &mut self.output
    }

    pub fn parameter_count(&self) -> usize {
        self.hidden.weights.len() + self.output.weights.len()
    }

    pub fn parameters(&self) -> impl Iterator<Item = &f64> {
        self.hidden.weights.iter().chain(self.output.weights.iter())
    }

    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.hidden
            .weights
            .iter_mut()
            .chain(self.output.weights.iter_mut())
    }

    pub fn is_finite(&self) -> bool {
        self.parameters().all(|w| w.is_finite())
    }

    fn check_input(&self, x: &[f64]) -> Result<(), MlpError> {
        if x.len() != self.hidden.inputs {
            return Err(MlpError::DimensionMismatch {
                expected: self.hidden.inputs,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn check_sample(&self, sample: &LabeledSample) -> Result<(), MlpError> {
        self.check_input(&sample.features)?;
        if sample.label >= self.output.outputs {
            return Err(MlpError::LabelOutOfRange {
                label: sample.label,
                classes: self.output.outputs,
            });
        }
        Ok(())
    }

    /// Panics if `x` does not match the input layer.
    pub fn activations(&self, x: &[f64]) -> Activations {
        assert_eq!(x.len(), self.hidden.inputs, "input length mismatch");
        let mut hidden = vec![0.0; self.hidden.outputs];
        let mut output = vec![0.0; self.output.outputs];
        self.hidden.activate(x, &mut hidden);
        self.output.activate(&hidden, &mut output);
        Activations { hidden, output }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.activations(x).output
    }

    pub fn try_forward(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        self.check_input(x)?;
        Ok(self.forward(x))
    }

    /// Index of the largest output; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.forward(x))
    }

    /// Analytic gradient of `E = ½‖target − output‖²` for one sample.
    pub fn gradient(&self, sample: &LabeledSample) -> Result<Gradient, MlpError> {
        self.check_sample(sample)?;
        let mut grad = Gradient::zeros_like(self);
        self.backprop(sample, &mut grad);
        Ok(grad)
    }

    /// Writes the gradient into `grad` and returns the sample's `Σ(t − o)²`.
    pub(crate) fn backprop(&self, sample: &LabeledSample, grad: &mut Gradient) -> f64 {
        let x = &sample.features;
        let act = self.activations(x);
        let n_in = self.hidden.inputs;
        let n_hid = self.hidden.outputs;

        let mut sse = 0.0;
        let out_delta: Vec<f64> = act
            .output
            .iter()
            .enumerate()
            .map(|(j, &o)| {
                let t = if j == sample.label { 1.0 } else { 0.0 };
                sse += (t - o) * (t - o);
                (o - t) * o * (1.0 - o)
            })
            .collect();

        let cols = n_hid + 1;
        for (j, &d) in out_delta.iter().enumerate() {
            let row = &mut grad.output[j * cols..(j + 1) * cols];
            for (g, &h) in row.iter_mut().zip(&act.hidden) {
                *g = d * h;
            }
            row[n_hid] = d;
        }

        let cols = n_in + 1;
        for (i, &h) in act.hidden.iter().enumerate() {
            let back: f64 = out_delta
                .iter()
                .enumerate()
                .map(|(j, &d)| d * self.output.row(j)[i])
                .sum();
            let d = back * h * (1.0 - h);
            let row = &mut grad.hidden[i * cols..(i + 1) * cols];
            for (g, &xi) in row.iter_mut().zip(x) {
                *g = d * xi;
            }
            row[n_in] = d;
        }
        sse
    }

    /// `Σ(t − o)²` over the samples.
    pub fn sum_squared_error(&self, data: &[LabeledSample]) -> f64 {
        data.iter()
            .map(|s| {
                let out = self.forward(&s.features);
                out.iter()
                    .enumerate()
                    .map(|(j, &o)| {
                        let t = if j == s.label { 1.0 } else { 0.0 };
                        (t - o) * (t - o)
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    /// Fraction of samples classified correctly, in `[0, 1]`.
    pub fn accuracy(&self, data: &[LabeledSample]) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let correct = data
            .iter()
            .filter(|s| self.predict(&s.features) == s.label)
            .count();
        correct as f64 / data.len() as f64
    }
}

/// A 76–`hidden`–10 network initialized from the config's seed.
pub fn init_model(config: &TrainingConfig) -> MlpModel {
    MlpModel::init(FEATURE_LEN, config.hidden_size, NUM_CLASSES, config.seed)
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
