//! Backpropagation and mini-batch training.
//!
//! The objective for a batch of `B` rows is `loss(targets, x̃) + λ Σ W²`,
//! where the penalty runs over weight matrices only (biases are not
//! penalized) and a tied weight matrix counts once.

use std::borrow::Cow;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{self, LossKind};
use crate::nn::{Activation, FfaModel};
use crate::tensor::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adam" => Ok(OptimizerKind::Adam),
            "sgd" => Ok(OptimizerKind::Sgd),
            other => Err(Error::Config(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2_lambda: f64,
    pub tied_weights: bool,
    pub shuffle_seed: u64,
    /// Print `epoch <k>/<K> loss <value>` to stderr after every epoch.
    #[serde(default)]
    pub report_progress: bool,
}

impl Default for TrainConfig {
    /// Adam with the usual hyperparameters, cross-entropy, 30 epochs of
    /// batches of 256.
    fn default() -> Self {
        TrainConfig {
            loss: LossKind::Bce,
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 30,
            batch_size: 256,
            l2_lambda: 0.0,
            tied_weights: false,
            shuffle_seed: 0,
            report_progress: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return fail(format!(
                "Adam betas must lie in [0, 1), got {} and {}",
                self.beta1, self.beta2
            ));
        }
        if !(self.epsilon > 0.0) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return fail(format!("l2 lambda must be non-negative, got {}", self.l2_lambda));
        }
        Ok(())
    }
}

/// Gradients of the batch objective, shaped like the model's parameters.
///
/// For a tied model the decoder weight gradient is the transpose of the
/// gradient of the shared encoder matrix, so both positions carry the
/// same numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Matrix>,
    /// Objective value at the point where the gradient was taken.
    pub objective: f64,
}

/// `λ Σ W²` over distinct weight matrices.
pub fn l2_penalty(model: &FfaModel, l2_lambda: f64) -> f64 {
    if l2_lambda == 0.0 {
        return 0.0;
    }
    l2_lambda * distinct_weights(model).map(Matrix::sum_of_squares).sum::<f64>()
}

fn distinct_weights(model: &FfaModel) -> impl Iterator<Item = &Matrix> {
    let l = model.layers().len();
    let keep = if model.is_tied() { l / 2 } else { l };
    model.layers()[..keep].iter().map(|layer| &layer.weights)
}

/// Objective `loss + λ Σ W²` without gradients.
pub fn objective(
    model: &FfaModel,
    inputs: &Matrix,
    targets: &Matrix,
    loss: LossKind,
    l2_lambda: f64,
) -> Result<f64> {
    let out = model.reconstruct(inputs)?;
    let data_loss = match loss {
        LossKind::Mse => loss::mse(targets, &out)?,
        LossKind::Bce => loss::bce_clamped(targets, &out)?,
    };
    Ok(data_loss + l2_penalty(model, l2_lambda))
}

/// Gradients of `loss(targets, model(inputs)) + λ Σ W²` with respect to
/// every weight and bias.
///
/// With cross-entropy and a sigmoid output the output-layer delta is taken
/// in its simplified form `(x̃ − x)/B`; with other output activations the
/// strict cross-entropy gradient is chained through the activation.
pub fn backprop(
    model: &FfaModel,
    inputs: &Matrix,
    targets: &Matrix,
    loss: LossKind,
    l2_lambda: f64,
) -> Result<Gradients> {
    if inputs.rows() != targets.rows() || targets.cols() != model.input_dim() {
        return Err(Error::dimension("backprop targets", inputs.shape(), targets.shape()));
    }
    loss.check_targets(targets)?;
    let trace = model.forward(inputs)?;
    let layers = model.layers();
    let last = layers.len() - 1;
    let output = trace.output();
    let batch = inputs.rows() as f64;

    let (data_loss, mut delta) = match (loss, layers[last].activation) {
        (LossKind::Bce, Activation::Sigmoid) => {
            let value = loss::bce_clamped(targets, output)?;
            let delta = output.sub(targets)?.scale(1.0 / batch);
            (value, delta)
        }
        (LossKind::Bce, act) => {
            let value = loss::bce(targets, output)?;
            let upstream = loss::bce_grad(targets, output)?;
            (value, chain(act, &upstream, &trace.pre[last], output))
        }
        (LossKind::Mse, act) => {
            let value = loss::mse(targets, output)?;
            let upstream = loss::mse_grad(targets, output)?;
            (value, chain(act, &upstream, &trace.pre[last], output))
        }
    };

    let mut weights = vec![Matrix::zeros(0, 0); layers.len()];
    let mut biases = vec![Matrix::zeros(0, 0); layers.len()];
    for k in (0..layers.len()).rev() {
        let layer_input = if k == 0 { inputs } else { &trace.post[k - 1] };
        weights[k] = layer_input.transpose_matmul(&delta)?;
        biases[k] = delta.column_sums();
        if k > 0 {
            let upstream = delta.matmul_transpose(&layers[k].weights)?;
            delta = chain(layers[k - 1].activation, &upstream, &trace.pre[k - 1], &trace.post[k - 1]);
        }
    }

    let l = layers.len();
    let shared = if model.is_tied() { l / 2 } else { l };
    if model.is_tied() {
        for k in 0..shared {
            let mirror = l - 1 - k;
            weights[k] = weights[k].add(&weights[mirror].transpose())?;
        }
    }
    if l2_lambda != 0.0 {
        for (k, grad) in weights.iter_mut().enumerate().take(shared) {
            let decay = layers[k].weights.scale(2.0 * l2_lambda);
            *grad = grad.add(&decay)?;
        }
    }
    if model.is_tied() {
        for k in 0..shared {
            weights[l - 1 - k] = weights[k].transpose();
        }
    }

    Ok(Gradients {
        weights,
        biases,
        objective: data_loss + l2_penalty(model, l2_lambda),
    })
}

/// `upstream ⊙ f'(z)`.
fn chain(activation: Activation, upstream: &Matrix, pre: &Matrix, post: &Matrix) -> Matrix {
    if activation == Activation::Identity {
        return upstream.clone();
    }
    let data = upstream
        .data()
        .iter()
        .zip(pre.data().iter().zip(post.data()))
        .map(|(&g, (&z, &a))| g * activation.derivative_cached(z, a))
        .collect();
    Matrix::new(upstream.rows(), upstream.cols(), data).expect("shapes agree")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl From<&TrainConfig> for AdamParams {
    fn from(c: &TrainConfig) -> Self {
        AdamParams {
            learning_rate: c.learning_rate,
            beta1: c.beta1,
            beta2: c.beta2,
            epsilon: c.epsilon,
        }
    }
}

/// First and second moment estimates for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl Moments {
    pub fn zeros(len: usize) -> Self {
        Moments {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// One bias-corrected Adam update; `step` counts from 1.
pub fn adam_step(params: &mut [f64], grads: &[f64], moments: &mut Moments, step: u64, hp: &AdamParams) {
    debug_assert_eq!(params.len(), grads.len());
    let t = step as i32;
    let correction1 = 1.0 - hp.beta1.powi(t);
    let correction2 = 1.0 - hp.beta2.powi(t);
    for (((p, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(moments.m.iter_mut())
        .zip(moments.v.iter_mut())
    {
        *m = hp.beta1 * *m + (1.0 - hp.beta1) * g;
        *v = hp.beta2 * *v + (1.0 - hp.beta2) * g * g;
        let m_hat = *m / correction1;
        let v_hat = *v / correction2;
        *p -= hp.learning_rate * m_hat / (v_hat.sqrt() + hp.epsilon);
    }
}

pub fn sgd_step(params: &mut [f64], grads: &[f64], learning_rate: f64) {
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= learning_rate * g;
    }
}

/// Optimizer state for every parameter tensor of a model.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    kind: OptimizerKind,
    step: u64,
    weight_moments: Vec<Moments>,
    bias_moments: Vec<Moments>,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, model: &FfaModel) -> Self {
        let (weight_moments, bias_moments) = match kind {
            OptimizerKind::Adam => (
                model.layers().iter().map(|l| Moments::zeros(l.weights.data().len())).collect(),
                model.layers().iter().map(|l| Moments::zeros(l.bias.cols())).collect(),
            ),
            OptimizerKind::Sgd => (Vec::new(), Vec::new()),
        };
        OptimizerState {
            kind,
            step: 0,
            weight_moments,
            bias_moments,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Applies one update. Decoder weights of a tied model are not updated
    /// directly; they are re-copied from the encoder afterwards.
    pub fn apply(&mut self, model: &mut FfaModel, grads: &Gradients, config: &TrainConfig) {
        self.step += 1;
        let hp = AdamParams::from(config);
        let l = model.layers().len();
        let shared = if model.is_tied() { l / 2 } else { l };
        for (k, layer) in model.layers_mut().iter_mut().enumerate() {
            let update_weights = k < shared;
            match self.kind {
                OptimizerKind::Adam => {
                    if update_weights {
                        adam_step(
                            layer.weights.data_mut(),
                            grads.weights[k].data(),
                            &mut self.weight_moments[k],
                            self.step,
                            &hp,
                        );
                    }
                    adam_step(
                        layer.bias.data_mut(),
                        grads.biases[k].data(),
                        &mut self.bias_moments[k],
                        self.step,
                        &hp,
                    );
                }
                OptimizerKind::Sgd => {
                    if update_weights {
                        sgd_step(layer.weights.data_mut(), grads.weights[k].data(), config.learning_rate);
                    }
                    sgd_step(layer.bias.data_mut(), grads.biases[k].data(), config.learning_rate);
                }
            }
        }
        model.sync_tied();
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean of the batch objectives of each epoch.
    pub epoch_losses: Vec<f64>,
    pub wall_time_secs: f64,
    pub optimizer_steps: u64,
    pub model: FfaModel,
}

/// Trains `model` to map `data` onto `targets` (equal to `data` for a plain
/// autoencoder).
pub fn fit(model: FfaModel, data: &Matrix, targets: &Matrix, config: &TrainConfig) -> Result<TrainReport> {
    if data.shape() != targets.shape() {
        return Err(Error::dimension("fit", data.shape(), targets.shape()));
    }
    fit_with_inputs(model, targets, config, |_| Ok(Cow::Borrowed(data)))
}

/// Like [`fit`], but asks `inputs_for_epoch(epoch)` for the input matrix at
/// the start of every epoch (0-based). Used to re-corrupt inputs each epoch.
pub fn fit_with_inputs<'a, F>(
    mut model: FfaModel,
    targets: &Matrix,
    config: &TrainConfig,
    mut inputs_for_epoch: F,
) -> Result<TrainReport>
where
    F: FnMut(usize) -> Result<Cow<'a, Matrix>>,
{
    config.validate()?;
    if targets.rows() == 0 {
        return Err(Error::EmptyInput("no training observations".into()));
    }
    if targets.cols() != model.input_dim() {
        return Err(Error::dimension(
            "fit",
            targets.shape(),
            (targets.rows(), model.input_dim()),
        ));
    }
    config.loss.check_targets(targets)?;
    if config.loss == LossKind::Bce && model.output_activation() != Activation::Sigmoid {
        log::warn!(
            "binary cross-entropy paired with a {} output layer; a sigmoid output is expected",
            model.output_activation()
        );
    }
    if config.tied_weights && !model.is_tied() {
        model = model.tie_weights()?;
    }

    let started = Instant::now();
    let rows = targets.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut optimizer = OptimizerState::new(config.optimizer, &model);
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let inputs = inputs_for_epoch(epoch)?;
        if inputs.shape() != targets.shape() {
            return Err(Error::dimension("fit inputs", inputs.shape(), targets.shape()));
        }
        let mut order: Vec<usize> = (0..rows).collect();
        order.shuffle(&mut rng);

        let mut total = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let batch_in = inputs.select_rows(chunk);
            let batch_target = targets.select_rows(chunk);
            let grads = backprop(&model, &batch_in, &batch_target, config.loss, config.l2_lambda)?;
            optimizer.apply(&mut model, &grads, config);
            total += grads.objective;
            batches += 1;
        }
        let mean = total / batches as f64;
        if !mean.is_finite() {
            return Err(Error::Domain(format!(
                "training diverged at epoch {}: loss is {mean}",
                epoch + 1
            )));
        }
        if config.report_progress {
            eprintln!("epoch {}/{} loss {mean}", epoch + 1, config.epochs);
        }
        epoch_losses.push(mean);
    }

    Ok(TrainReport {
        epoch_losses,
        wall_time_secs: started.elapsed().as_secs_f64(),
        optimizer_steps: optimizer.steps_taken(),
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Architecture, DenseLayer};

    fn mse_config(epochs: usize, batch_size: usize) -> TrainConfig {
        TrainConfig {
            loss: LossKind::Mse,
            epochs,
            batch_size,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = [
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { beta1: 1.0, ..Default::default() },
            TrainConfig { beta2: -0.1, ..Default::default() },
            TrainConfig { epsilon: 0.0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { l2_lambda: -1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn invalid_config_fails_before_training() {
        let model = Architecture::new(vec![3, 2, 3], Activation::Relu, Activation::Sigmoid)
            .build(0)
            .unwrap();
        let x = Matrix::filled(4, 3, 0.5);
        let c = TrainConfig { batch_size: 0, ..Default::default() };
        assert!(matches!(fit(model, &x, &x, &c), Err(Error::Config(_))));
    }

    #[test]
    fn bce_with_unnormalized_targets_is_a_domain_error() {
        let model = Architecture::new(vec![3, 2, 3], Activation::Relu, Activation::Sigmoid)
            .build(0)
            .unwrap();
        let x = Matrix::filled(4, 3, 128.0);
        let err = fit(model.clone(), &x, &x, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(backprop(&model, &x, &x, LossKind::Bce, 0.0).is_err());
    }

    #[test]
    fn zero_everything_gives_zero_gradients() {
        let layer = |i, o| DenseLayer::new(Matrix::zeros(i, o), Matrix::zeros(1, o), Activation::Identity).unwrap();
        let model = FfaModel::new(vec![layer(4, 2), layer(2, 4)], 1).unwrap();
        let x = Matrix::zeros(3, 4);
        let g = backprop(&model, &x, &x, LossKind::Mse, 0.5).unwrap();
        for m in g.weights.iter().chain(&g.biases) {
            assert!(m.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn l2_term_adds_two_lambda_theta() {
        let model = Architecture::new(vec![5, 3, 5], Activation::Sigmoid, Activation::Sigmoid)
            .build(9)
            .unwrap();
        let x = Matrix::from_fn(4, 5, |i, j| ((i * 5 + j) % 7) as f64 / 7.0);
        let lambda = 0.3;
        let plain = backprop(&model, &x, &x, LossKind::Bce, 0.0).unwrap();
        let reg = backprop(&model, &x, &x, LossKind::Bce, lambda).unwrap();
        for (k, layer) in model.layers().iter().enumerate() {
            let diff = reg.weights[k].sub(&plain.weights[k]).unwrap();
            let expected = layer.weights.scale(2.0 * lambda);
            assert!(diff.max_abs_diff(&expected).unwrap() < 1e-15);
            assert_eq!(reg.biases[k], plain.biases[k]);
        }
        let penalty = lambda * model.layers().iter().map(|l| l.weights.sum_of_squares()).sum::<f64>();
        assert!((reg.objective - plain.objective - penalty).abs() < 1e-12);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let hp = AdamParams { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 };
        let mut params = vec![1.0, -2.0, 0.5];
        let grads = [0.3, -4.0, 1e-3];
        let mut moments = Moments::zeros(3);
        adam_step(&mut params, &grads, &mut moments, 1, &hp);
        // m̂ = g and v̂ = g², so the step is lr·g/(|g| + ε)
        let expected = [
            1.0 - 1e-3 * 0.3 / (0.3 + 1e-8),
            -2.0 + 1e-3 * 4.0 / (4.0 + 1e-8),
            0.5 - 1e-3 * 1e-3 / (1e-3 + 1e-8),
        ];
        for (p, e) in params.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15, "{p} vs {e}");
        }
        assert!((params[0] - (1.0 - 1e-3)).abs() < 1e-10);
        assert!((params[1] - (-2.0 + 1e-3)).abs() < 1e-10);
    }

    #[test]
    fn adam_zero_gradient_leaves_parameters() {
        let hp = AdamParams { learning_rate: 1e-2, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 };
        let mut params = vec![0.25, -1.5];
        let mut moments = Moments::zeros(2);
        for step in 1..=100 {
            adam_step(&mut params, &[0.0, 0.0], &mut moments, step, &hp);
        }
        assert_eq!(params, vec![0.25, -1.5]);
    }

    #[test]
    fn one_step_per_epoch_when_batch_covers_data() {
        let model = Architecture::new(vec![3, 2, 3], Activation::Relu, Activation::Identity)
            .build(0)
            .unwrap();
        let x = Matrix::from_fn(10, 3, |i, j| (i + j) as f64 * 0.1);
        let report = fit(model.clone(), &x, &x, &mse_config(1, 10)).unwrap();
        assert_eq!(report.optimizer_steps, 1);
        let report = fit(model.clone(), &x, &x, &mse_config(1, 64)).unwrap();
        assert_eq!(report.optimizer_steps, 1);
        // the last partial batch is kept
        let report = fit(model, &x, &x, &mse_config(2, 4)).unwrap();
        assert_eq!(report.optimizer_steps, 6);
        assert_eq!(report.epoch_losses.len(), 2);
    }

    #[test]
    fn training_is_deterministic() {
        let arch = Architecture::new(vec![6, 3, 6], Activation::Relu, Activation::Sigmoid);
        let x = Matrix::from_fn(40, 6, |i, j| ((i * 13 + j * 7) % 17) as f64 / 17.0);
        let config = TrainConfig { epochs: 5, batch_size: 8, shuffle_seed: 11, ..Default::default() };
        let a = fit(arch.build(3).unwrap(), &x, &x, &config).unwrap();
        let b = fit(arch.build(3).unwrap(), &x, &x, &config).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.epoch_losses, b.epoch_losses);
        let c = fit(
            arch.build(3).unwrap(),
            &x,
            &x,
            &TrainConfig { shuffle_seed: 12, ..config },
        )
        .unwrap();
        assert_ne!(a.model, c.model);
    }

    #[test]
    fn linear_subspace_is_learned_exactly() {
        // 64 points on a 2-D subspace of R^4; a (4,2,4) linear AE can reproduce them
        let basis = [[1.0, 0.5, -0.3, 0.2], [-0.4, 1.0, 0.6, -0.5]];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Matrix::from_fn(64, 4, |_, _| 0.0);
        let coords: Vec<[f64; 2]> = (0..64)
            .map(|_| {
                use rand::Rng;
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
            })
            .collect();
        let x = Matrix::from_fn(x.rows(), 4, |i, j| coords[i][0] * basis[0][j] + coords[i][1] * basis[1][j]);
        let model = Architecture::new(vec![4, 2, 4], Activation::Identity, Activation::Identity)
            .build(1)
            .unwrap();
        let config = TrainConfig {
            learning_rate: 1e-2,
            ..mse_config(2000, 64)
        };
        let report = fit(model, &x, &x, &config).unwrap();
        let final_loss = *report.epoch_losses.last().unwrap();
        assert!(final_loss < 1e-3, "final loss {final_loss}");
    }

    #[test]
    fn weight_decay_without_data_gradient_is_monotone() {
        let model = Architecture::new(vec![4, 2, 4], Activation::Identity, Activation::Identity)
            .build(2)
            .unwrap();
        let x = Matrix::zeros(5, 4);
        let config = TrainConfig {
            optimizer: OptimizerKind::Sgd,
            learning_rate: 0.1,
            l2_lambda: 0.5,
            ..mse_config(1, 5)
        };
        let mut current = model;
        let mut previous: Vec<f64> = current.layers().iter().flat_map(|l| l.weights.data().to_vec()).collect();
        for _ in 0..10 {
            current = fit(current, &x, &x, &config).unwrap().model;
            let now: Vec<f64> = current.layers().iter().flat_map(|l| l.weights.data().to_vec()).collect();
            for (a, b) in now.iter().zip(&previous) {
                assert!(a.abs() < b.abs(), "{a} not smaller than {b}");
            }
            previous = now;
        }
    }

    #[test]
    fn tied_training_keeps_decoder_transposed() {
        let model = Architecture::new(vec![6, 4, 2, 4, 6], Activation::Sigmoid, Activation::Sigmoid)
            .build(4)
            .unwrap();
        let x = Matrix::from_fn(20, 6, |i, j| ((i * 3 + j * 5) % 11) as f64 / 11.0);
        let config = TrainConfig { epochs: 3, batch_size: 7, tied_weights: true, ..Default::default() };
        let trained = fit(model, &x, &x, &config).unwrap().model;
        assert!(trained.is_tied());
        let l = trained.layers().len();
        for k in 0..l / 2 {
            assert_eq!(trained.layers()[l - 1 - k].weights, trained.layers()[k].weights.transpose());
        }
    }
}
