//! Online backpropagation with momentum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Gradient, LabeledSample, MlpError, MlpModel};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    /// Step size η.
    pub learning_rate: f64,
    /// Momentum α, in `[0, 1)`.
    pub momentum: f64,
    pub max_epochs: usize,
    pub seed: u64,
    pub hidden_size: usize,
    /// Minimum per-epoch drop in SSE that counts as progress.
    pub stop_tolerance: f64,
    /// Consecutive epochs without progress before training halts.
    pub patience: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.8,
            momentum: 0.7,
            max_epochs: 500,
            seed: 1,
            hidden_size: 65,
            stop_tolerance: 1e-4,
            patience: 20,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), MlpError> {
        let bad = |msg: String| Err(MlpError::InvalidConfig(msg));
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!("learning rate {} must be finite and >= 0", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} must lie in [0, 1)", self.momentum));
        }
        if self.hidden_size == 0 {
            return bad("hidden size must be positive".into());
        }
        if !(self.stop_tolerance.is_finite() && self.stop_tolerance >= 0.0) {
            return bad(format!("stop tolerance {} must be >= 0", self.stop_tolerance));
        }
        if self.patience == 0 {
            return bad("patience must be positive".into());
        }
        Ok(())
    }
}

/// Per-epoch sample order: a ChaCha8 stream (stream 1 of `seed`) driving a
/// Fisher–Yates shuffle of the running permutation.
#[derive(Debug, Clone)]
pub struct EpochShuffler {
    rng: ChaCha8Rng,
    order: Vec<usize>,
}

impl EpochShuffler {
    pub fn new(seed: u64, len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        Self {
            rng,
            order: (0..len).collect(),
        }
    }

    pub fn next_epoch(&mut self) -> &[usize] {
        self.order.shuffle(&mut self.rng);
        &self.order
    }
}

/// Per-sample updates `Δw(t) = −η ∂E/∂w + α Δw(t−1)` over shuffled epochs.
/// Returns the trained model and the SSE accumulated during each epoch.
pub fn train(
    mut model: MlpModel,
    data: &[LabeledSample],
    config: &TrainingConfig,
) -> Result<(MlpModel, Vec<f64>), MlpError> {
    config.validate()?;
    if data.is_empty() {
        return Err(MlpError::EmptyDataset);
    }
    for sample in data {
        model.check_sample(sample)?;
    }

    let eta = config.learning_rate;
    let alpha = config.momentum;
    let mut grad = Gradient::zeros_like(&model);
    let mut velocity = Gradient::zeros_like(&model);
    let mut shuffler = EpochShuffler::new(config.seed, data.len());
    let mut history = Vec::new();
    let mut stalled = 0;

    for _ in 0..config.max_epochs {
        let mut sse = 0.0;
        for &i in shuffler.next_epoch() {
            sse += model.backprop(&data[i], &mut grad);
            step(&mut model.hidden.weights, &grad.hidden, &mut velocity.hidden, eta, alpha);
            step(&mut model.output.weights, &grad.output, &mut velocity.output, eta, alpha);
        }
        if let Some(&prev) = history.last() {
            if prev - sse < config.stop_tolerance {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        history.push(sse);
        if stalled >= config.patience {
            break;
        }
    }
    Ok((model, history))
}

fn step(weights: &mut [f64], grad: &[f64], velocity: &mut [f64], eta: f64, alpha: f64) {
    for ((w, g), v) in weights.iter_mut().zip(grad).zip(velocity.iter_mut()) {
        *v = -eta * g + alpha * *v;
        *w += *v;
    }
}
