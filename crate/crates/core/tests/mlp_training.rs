//! Backpropagation checked against finite differences and an independent
//! plain-SGD loop; training convergence on small problems.

use digitrec::extract_features;
use digitrec::mlp::{
    init_model, train, EpochShuffler, Layer, LabeledSample, MlpModel, TrainingConfig,
};
use digitrec::toy::render_glyph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-6;
/// Denominator floor for the relative error; below it the comparison is
/// effectively absolute (finite differences carry ~1e-11 of rounding).
const REL_FLOOR: f64 = 1e-4;

fn half_sse(model: &MlpModel, sample: &LabeledSample) -> f64 {
    0.5 * model.sum_squared_error(std::slice::from_ref(sample))
}

fn max_relative_gradient_error(model: &MlpModel, sample: &LabeledSample) -> f64 {
    let analytic: Vec<f64> = model.gradient(sample).unwrap().iter().copied().collect();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let nudged = |delta: f64| {
            let mut m = model.clone();
            *m.parameters_mut().nth(i).unwrap() += delta;
            half_sse(&m, sample)
        };
        let numeric = (nudged(FD_STEP) - nudged(-FD_STEP)) / (2.0 * FD_STEP);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
        worst = worst.max(rel);
    }
    worst
}

#[test]
fn gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..40u64 {
        let model = MlpModel::init(4, 3, 2, 1000 + trial);
        let features = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sample = LabeledSample::new(features, rng.random_range(0..2));
        let err = max_relative_gradient_error(&model, &sample);
        assert!(err < REL_TOL, "trial {trial}: relative error {err:e}");
    }
}

#[test]
fn gradient_check_on_full_topology_subset() {
    let model = MlpModel::init(76, 8, 10, 3);
    let img = render_glyph(4, 1, -1);
    let sample = LabeledSample::from_features(&extract_features(&img), 4);
    assert!(max_relative_gradient_error(&model, &sample) < REL_TOL);
}

#[test]
fn gradient_vanishes_at_target() {
    // Saturated output biases make the outputs exactly 0 and 1.
    let hidden = Layer::from_weights(4, 3, vec![0.1; 15]).unwrap();
    let output = Layer::from_weights(3, 2, vec![0.0, 0.0, 0.0, -800.0, 0.0, 0.0, 0.0, 800.0]).unwrap();
    let model = MlpModel::from_layers(hidden, output).unwrap();
    let sample = LabeledSample::new(vec![0.2, 0.4, 0.6, 0.8], 1);
    assert_eq!(model.forward(&sample.features), vec![0.0, 1.0]);
    assert!(model.gradient(&sample).unwrap().iter().all(|&g| g == 0.0));
}

#[test]
fn memorizes_a_single_sample() {
    let features = extract_features(&render_glyph(3, 0, 0));
    let data = vec![LabeledSample::from_features(&features, 3)];
    let config = TrainingConfig::default();
    let (model, history) = train(init_model(&config), &data, &config).unwrap();
    assert!(history.len() <= 500);
    assert_eq!(model.predict(features.as_slice()), 3);
    assert!(model.sum_squared_error(&data) < 0.01);
}

#[test]
fn separates_two_linear_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut data = Vec::new();
    while data.len() < 200 {
        let x: Vec<f64> = (0..76).map(|_| rng.random::<f64>()).collect();
        let score: f64 = x[..38].iter().sum::<f64>() - x[38..].iter().sum::<f64>();
        if score.abs() < 0.5 {
            continue;
        }
        data.push(LabeledSample::new(x, usize::from(score > 0.0)));
    }
    let config = TrainingConfig { max_epochs: 200, ..Default::default() };
    let (model, _) = train(init_model(&config), &data, &config).unwrap();
    assert_eq!(model.accuracy(&data), 1.0);
}

#[test]
fn training_is_deterministic() {
    let data: Vec<LabeledSample> = (0..10)
        .map(|c| LabeledSample::from_features(&extract_features(&render_glyph(c, 0, 1)), c))
        .collect();
    let config = TrainingConfig { max_epochs: 30, ..Default::default() };
    let a = train(init_model(&config), &data, &config).unwrap();
    let b = train(init_model(&config), &data, &config).unwrap();
    assert_eq!(a, b);
    let bits = |m: &MlpModel| m.parameters().map(|w| w.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.0), bits(&b.0));
}

/// Plain SGD written independently of the momentum path.
fn plain_sgd(mut model: MlpModel, data: &[LabeledSample], eta: f64, epochs: usize, seed: u64) -> MlpModel {
    let mut shuffler = EpochShuffler::new(seed, data.len());
    for _ in 0..epochs {
        let order = shuffler.next_epoch().to_vec();
        for i in order {
            let g = model.gradient(&data[i]).unwrap();
            let flat: Vec<f64> = g.iter().copied().collect();
            for (w, gi) in model.parameters_mut().zip(flat) {
                *w -= eta * gi;
            }
        }
    }
    model
}

#[test]
fn zero_momentum_is_plain_sgd() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let data: Vec<LabeledSample> = (0..25)
        .map(|i| LabeledSample::new((0..6).map(|_| rng.random::<f64>()).collect(), i % 3))
        .collect();
    let config = TrainingConfig {
        learning_rate: 0.5,
        momentum: 0.0,
        max_epochs: 15,
        stop_tolerance: 0.0,
        seed: 9,
        hidden_size: 5,
        ..Default::default()
    };
    let start = MlpModel::init(6, 5, 3, 9);
    let (trained, _) = train(start.clone(), &data, &config).unwrap();
    let reference = plain_sgd(start, &data, 0.5, 15, 9);
    assert_eq!(trained, reference);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_step_never_raises_sample_error(
        seed in any::<u64>(),
        x in proptest::collection::vec(0.0f64..1.0, 5),
        label in 0usize..3,
    ) {
        let model = MlpModel::init(5, 4, 3, seed);
        let sample = LabeledSample::new(x, label);
        let config = TrainingConfig {
            learning_rate: 1e-3,
            momentum: 0.0,
            max_epochs: 1,
            hidden_size: 4,
            ..Default::default()
        };
        let before = half_sse(&model, &sample);
        let (after_model, _) = train(model, std::slice::from_ref(&sample), &config).unwrap();
        prop_assert!(half_sse(&after_model, &sample) <= before);
    }

    #[test]
    fn outputs_stay_in_open_unit_interval(
        seed in any::<u64>(),
        x in proptest::collection::vec(0.0f64..1.0, 76),
    ) {
        let model = MlpModel::init(76, 65, 10, seed);
        let out = model.forward(&x);
        prop_assert_eq!(out.len(), 10);
        prop_assert!(out.iter().all(|&o| o > 0.0 && o < 1.0));
        prop_assert!(model.predict(&x) < 10);
    }

    #[test]
    fn prediction_ignores_monotone_rescaling(values in proptest::collection::vec(0.0f64..1.0, 10)) {
        let base = digitrec::mlp::argmax(&values);
        let warped: Vec<f64> = values.iter().map(|v| (3.0 * v).exp() - 2.0).collect();
        prop_assert_eq!(digitrec::mlp::argmax(&warped), base);
    }
}
