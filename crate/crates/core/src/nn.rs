//! Dense layers and the feed-forward autoencoder model.
//!
//! A model is an ordered list of dense layers. The layer sizes form the list
//! `[n, n2, ..., q, ..., n]`; the entry at `bottleneck_index` is the latent
//! width `q`. Layers before the bottleneck make up the encoder and layers
//! after it the decoder, so `decode(encode(x))` replays exactly the same
//! arithmetic as `forward(x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Largest `f64` strictly below one.
const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Relu, Activation::Sigmoid, Activation::Identity];

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative with respect to the pre-activation `x`. `relu'(0)` is 0.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Identity => 1.0,
        }
    }

    /// Derivative given both the pre-activation `z` and the activation `a = f(z)`.
    #[inline]
    pub(crate) fn derivative_cached(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            _ => self.derivative(z),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Sigmoid => 1,
            Activation::Identity => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Sigmoid),
            2 => Some(Activation::Identity),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Logistic function, kept strictly inside `(0, 1)` for every finite input.
///
/// In `f64` the exact logistic rounds to 1.0 above x ≈ 37 and to 0.0 below
/// x ≈ -745; the result is clamped to the nearest representable interior
/// value so downstream cross-entropy never sees `log(0)`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    let s = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP)
}

pub fn activate(activation: Activation, x: &Matrix) -> Matrix {
    x.map(|v| activation.apply(v))
}

pub fn activate_derivative(activation: Activation, x: &Matrix) -> Matrix {
    x.map(|v| activation.derivative(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `(in_dim, out_dim)`; the layer computes `x · W + b`.
    pub weights: Matrix,
    /// `(1, out_dim)`.
    pub bias: Matrix,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Matrix, activation: Activation) -> Result<Self> {
        if bias.rows() != 1 || bias.cols() != weights.cols() {
            return Err(Error::dimension("dense layer bias", weights.shape(), bias.shape()));
        }
        Ok(DenseLayer {
            weights,
            bias,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn pre_activation(&self, x: &Matrix) -> Result<Matrix> {
        x.matmul(&self.weights)?.row_broadcast_add(&self.bias)
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        Ok(activate(self.activation, &self.pre_activation(x)?))
    }
}

/// Values cached by [`FfaModel::forward`] for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Pre-activation `z` of every layer.
    pub pre: Vec<Matrix>,
    /// Activation `a = f(z)` of every layer; the last one is the reconstruction.
    pub post: Vec<Matrix>,
}

impl ForwardTrace {
    pub fn output(&self) -> &Matrix {
        self.post.last().expect("trace of a model with at least one layer")
    }

    pub fn into_output(mut self) -> Matrix {
        self.post.pop().expect("trace of a model with at least one layer")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FfaModel {
    layers: Vec<DenseLayer>,
    bottleneck_index: usize,
    tied: bool,
}

impl FfaModel {
    /// Assembles a model from layers. `bottleneck_index` indexes
    /// [`layer_sizes`](Self::layer_sizes) and must be produced by a layer
    /// (`1..=layers.len()`).
    pub fn new(layers: Vec<DenseLayer>, bottleneck_index: usize) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("a model needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::dimension(
                    "layer chaining",
                    pair[0].weights.shape(),
                    pair[1].weights.shape(),
                ));
            }
        }
        let n_in = layers[0].in_dim();
        let n_out = layers[layers.len() - 1].out_dim();
        if n_in != n_out {
            return Err(Error::Config(format!(
                "reconstruction needs equal input and output widths, got {n_in} and {n_out}"
            )));
        }
        if bottleneck_index == 0 || bottleneck_index > layers.len() {
            return Err(Error::Config(format!(
                "bottleneck index {bottleneck_index} outside 1..={}",
                layers.len()
            )));
        }
        let model = FfaModel {
            layers,
            bottleneck_index,
            tied: false,
        };
        model.warn_on_unusual_shape();
        Ok(model)
    }

    fn warn_on_unusual_shape(&self) {
        let sizes = self.layer_sizes();
        let q = sizes[self.bottleneck_index];
        let n = sizes[0];
        if q == n && sizes.len() > 2 {
            log::warn!("latent width {q} equals the input width: the model has no bottleneck");
        }
        if let Some(smaller) = sizes[1..sizes.len() - 1].iter().find(|&&s| s < q) {
            log::warn!("interior layer of width {smaller} is narrower than the bottleneck ({q})");
        }
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn bottleneck_index(&self) -> usize {
        self.bottleneck_index
    }

    pub fn is_tied(&self) -> bool {
        self.tied
    }

    /// `[n, n2, ..., q, ..., n]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].in_dim())
            .chain(self.layers.iter().map(|l| l.out_dim()))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.layer_sizes()[self.bottleneck_index]
    }

    pub fn activations(&self) -> Vec<Activation> {
        self.layers.iter().map(|l| l.activation).collect()
    }

    pub fn output_activation(&self) -> Activation {
        self.layers[self.layers.len() - 1].activation
    }

    /// Number of trainable scalars; shared tied weights count once.
    pub fn parameter_count(&self) -> usize {
        let weights: usize = self
            .layers
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.tied || *k < self.layers.len() / 2)
            .map(|(_, l)| l.weights.data().len())
            .sum();
        let biases: usize = self.layers.iter().map(|l| l.bias.cols()).sum();
        weights + biases
    }

    /// Index of the encoder layer whose transpose layer `k` mirrors.
    pub fn mirror_of(&self, k: usize) -> usize {
        self.layers.len() - 1 - k
    }

    fn check_width(&self, x: &Matrix, expected: usize, op: &'static str) -> Result<()> {
        if x.cols() != expected {
            return Err(Error::dimension(op, x.shape(), (x.rows(), expected)));
        }
        Ok(())
    }

    /// Full forward pass, caching every layer's values.
    pub fn forward(&self, x: &Matrix) -> Result<ForwardTrace> {
        self.check_width(x, self.input_dim(), "forward")?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let input = post.last().unwrap_or(x);
            let z = layer.pre_activation(input)?;
            let a = activate(layer.activation, &z);
            pre.push(z);
            post.push(a);
        }
        Ok(ForwardTrace { pre, post })
    }

    fn run_layers(&self, layers: &[DenseLayer], x: &Matrix) -> Result<Matrix> {
        let mut current = x.clone();
        for layer in layers {
            current = layer.forward(&current)?;
        }
        Ok(current)
    }

    /// Reconstruction `x̃ = f(g(x))` without keeping intermediate values.
    pub fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        self.check_width(x, self.input_dim(), "reconstruct")?;
        self.run_layers(&self.layers, x)
    }

    /// Latent representation `h = g(x)`, shape `(rows, q)`.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        self.check_width(x, self.input_dim(), "encode")?;
        self.run_layers(&self.layers[..self.bottleneck_index], x)
    }

    /// Runs the layers after the bottleneck on `h`.
    pub fn decode(&self, h: &Matrix) -> Result<Matrix> {
        self.check_width(h, self.latent_dim(), "decode")?;
        self.run_layers(&self.layers[self.bottleneck_index..], h)
    }

    /// Whether layer sizes read the same backwards, the precondition for tying.
    pub fn is_symmetric(&self) -> bool {
        let sizes = self.layer_sizes();
        self.layers.len() % 2 == 0 && sizes.iter().eq(sizes.iter().rev())
    }

    /// Ties every decoder weight matrix to the transpose of its mirror
    /// encoder matrix. Decoder weights are overwritten by the transposes.
    pub fn tie_weights(mut self) -> Result<Self> {
        if !self.is_symmetric() {
            return Err(Error::Config(format!(
                "tied weights need a symmetric architecture, got {:?}",
                self.layer_sizes()
            )));
        }
        self.tied = true;
        self.sync_tied();
        Ok(self)
    }

    /// Re-copies decoder weights from the encoder after an update.
    pub(crate) fn sync_tied(&mut self) {
        if !self.tied {
            return;
        }
        let l = self.layers.len();
        for k in 0..l / 2 {
            let t = self.layers[k].weights.transpose();
            self.layers[l - 1 - k].weights = t;
        }
    }

    pub(crate) fn set_tied_flag(&mut self, tied: bool) {
        self.tied = tied;
    }
}

/// Anything that maps observations to reconstructions of the same shape.
pub trait Reconstruct {
    fn reconstruct(&self, x: &Matrix) -> Result<Matrix>;
}

impl Reconstruct for FfaModel {
    fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        FfaModel::reconstruct(self, x)
    }
}

impl<F> Reconstruct for F
where
    F: Fn(&Matrix) -> Result<Matrix>,
{
    fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        self(x)
    }
}

/// Glorot-uniform weights `U(-r, r)` with `r = sqrt(6 / (fan_in + fan_out))`,
/// zero biases. The latent layer is the narrowest interior layer (the middle
/// one for symmetric odd-length size lists).
pub fn init_weights(layer_sizes: &[usize], activations: &[Activation], seed: u64) -> Result<FfaModel> {
    if layer_sizes.len() < 2 {
        return Err(Error::Config(format!(
            "need at least an input and an output size, got {layer_sizes:?}"
        )));
    }
    if activations.len() != layer_sizes.len() - 1 {
        return Err(Error::Config(format!(
            "{} layer sizes need {} activations, got {}",
            layer_sizes.len(),
            layer_sizes.len() - 1,
            activations.len()
        )));
    }
    if let Some(pos) = layer_sizes.iter().position(|&s| s == 0) {
        return Err(Error::Config(format!("layer {pos} has zero width")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layer_sizes
        .windows(2)
        .zip(activations)
        .map(|(dims, &activation)| {
            let (fan_in, fan_out) = (dims[0], dims[1]);
            let limit = glorot_limit(fan_in, fan_out);
            let weights = Matrix::from_fn(fan_in, fan_out, |_, _| rng.random_range(-limit..=limit));
            DenseLayer {
                weights,
                bias: Matrix::zeros(1, fan_out),
                activation,
            }
        })
        .collect();
    FfaModel::new(layers, default_bottleneck(layer_sizes))
}

pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn default_bottleneck(sizes: &[usize]) -> usize {
    let interior = &sizes[1..sizes.len() - 1];
    if interior.is_empty() {
        return 1;
    }
    let min = *interior.iter().min().expect("non-empty");
    let candidates: Vec<usize> = (1..sizes.len() - 1).filter(|&i| sizes[i] == min).collect();
    // prefer the narrowest layer closest to the middle
    let middle = (sizes.len() - 1) as f64 / 2.0;
    *candidates
        .iter()
        .min_by(|&&a, &&b| {
            let da = (a as f64 - middle).abs();
            let db = (b as f64 - middle).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        })
        .expect("non-empty")
}

/// Layer sizes plus hidden/output activation kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub layer_sizes: Vec<usize>,
    pub hidden: Activation,
    pub output: Activation,
}

impl Architecture {
    pub fn new(layer_sizes: Vec<usize>, hidden: Activation, output: Activation) -> Self {
        Architecture {
            layer_sizes,
            hidden,
            output,
        }
    }

    pub fn activations(&self) -> Vec<Activation> {
        let layers = self.layer_sizes.len().saturating_sub(1);
        (0..layers)
            .map(|k| if k + 1 == layers { self.output } else { self.hidden })
            .collect()
    }

    pub fn build(&self, seed: u64) -> Result<FfaModel> {
        init_weights(&self.layer_sizes, &self.activations(), seed)
    }

    /// Parses `"784,16,784"`.
    pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
        let sizes = spec
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| Error::Config(format!("bad layer size `{tok}` in `{spec}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if sizes.len() < 2 {
            return Err(Error::Config(format!("architecture `{spec}` needs at least two sizes")));
        }
        if sizes[0] != sizes[sizes.len() - 1] {
            return Err(Error::Config(format!(
                "architecture `{spec}` must end with the input width {}",
                sizes[0]
            )));
        }
        Ok(sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_model(n: usize) -> FfaModel {
        let layer = DenseLayer::new(Matrix::identity(n), Matrix::zeros(1, n), Activation::Identity).unwrap();
        FfaModel::new(vec![layer], 1).unwrap()
    }

    /// Second forward implementation: explicit loops over neurons.
    fn oracle_forward(model: &FfaModel, x: &Matrix) -> Matrix {
        let mut rows: Vec<Vec<f64>> = x.iter_rows().map(|r| r.to_vec()).collect();
        for layer in model.layers() {
            rows = rows
                .iter()
                .map(|input| {
                    (0..layer.out_dim())
                        .map(|j| {
                            let mut z = layer.bias.get(0, j);
                            for (i, xi) in input.iter().enumerate() {
                                z += xi * layer.weights.get(i, j);
                            }
                            match layer.activation {
                                Activation::Relu => z.max(0.0),
                                Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                                Activation::Identity => z,
                            }
                        })
                        .collect()
                })
                .collect();
        }
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn activation_values() {
        assert_eq!(Activation::Relu.apply(-2.0), 0.0);
        assert_eq!(Activation::Relu.apply(3.5), 3.5);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert_eq!(Activation::Sigmoid.derivative(0.0), 0.25);
        assert_eq!(Activation::Identity.apply(-7.25), -7.25);
        assert_eq!(Activation::Identity.derivative(-7.25), 1.0);
    }

    #[test]
    fn relu_derivative_convention() {
        assert_eq!(Activation::Relu.derivative(0.0), 0.0);
        assert_eq!(Activation::Relu.derivative(1e-12), 1.0);
        assert_eq!(Activation::Relu.derivative(-1e-12), 0.0);
    }

    #[test]
    fn relu_is_max_on_grid() {
        for i in 0..1000 {
            let x = -10.0 + 20.0 * i as f64 / 999.0;
            assert_eq!(Activation::Relu.apply(x), f64::max(0.0, x));
            assert!(Activation::Relu.apply(x) >= 0.0);
        }
    }

    #[test]
    fn sigmoid_strictly_inside_unit_interval() {
        for &x in &[-1e308, -800.0, -745.0, -40.0, -1.0, 0.0, 1.0, 36.0, 40.0, 800.0, 1e308] {
            let s = sigmoid(x);
            assert!(s > 0.0 && s < 1.0, "sigmoid({x}) = {s}");
        }
    }

    #[test]
    fn zero_model_outputs_half() {
        let arch = Architecture::new(vec![4, 2, 4], Activation::Sigmoid, Activation::Sigmoid);
        let mut model = arch.build(0).unwrap();
        for layer in model.layers_mut() {
            layer.weights = Matrix::zeros(layer.in_dim(), layer.out_dim());
        }
        let x = Matrix::from_fn(3, 4, |i, j| (i + j) as f64);
        let out = model.forward(&x).unwrap();
        assert!(out.output().data().iter().all(|&v| v == 0.5));
        let h = model.encode(&x).unwrap();
        assert_eq!(h.shape(), (3, 2));
        assert!(h.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn identity_layer_reproduces_input() {
        let model = identity_model(3);
        let x = Matrix::from_fn(2, 3, |i, j| i as f64 * 1.5 - j as f64);
        assert_eq!(model.forward(&x).unwrap().output(), &x);
    }

    #[test]
    fn forward_matches_loop_oracle() {
        let arch = Architecture::new(vec![5, 3, 2, 3, 5], Activation::Relu, Activation::Sigmoid);
        let mut model = arch.build(42).unwrap();
        for (k, layer) in model.layers_mut().iter_mut().enumerate() {
            layer.bias = Matrix::from_fn(1, layer.out_dim(), |_, j| 0.1 * (j as f64 - k as f64));
        }
        let x = Matrix::from_fn(4, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.3);
        let fast = model.forward(&x).unwrap().into_output();
        let slow = oracle_forward(&model, &x);
        assert!(fast.max_abs_diff(&slow).unwrap() < 1e-13);
        assert_eq!(fast.shape(), x.shape());
    }

    #[test]
    fn encode_decode_shapes_and_composition() {
        let arch = Architecture::new(vec![4, 2, 4], Activation::Relu, Activation::Sigmoid);
        let model = arch.build(7).unwrap();
        let x = Matrix::from_fn(6, 4, |i, j| ((i * 4 + j) as f64 * 0.37).sin());
        let h = model.encode(&x).unwrap();
        assert_eq!(h.cols(), 2);
        let via_latent = model.decode(&h).unwrap();
        assert_eq!(via_latent, model.forward(&x).unwrap().into_output());
        assert_eq!(via_latent, model.reconstruct(&x).unwrap());
        assert!(matches!(model.decode(&x), Err(Error::Dimension { .. })));
        assert!(model.encode(&Matrix::zeros(1, 3)).is_err());
        assert_eq!(model.decode(&Matrix::zeros(1, 2)).unwrap().shape(), (1, 4));
    }

    #[test]
    fn init_is_deterministic_with_glorot_bounds() {
        let acts = [Activation::Relu, Activation::Sigmoid];
        let a = init_weights(&[784, 16, 784], &acts, 3).unwrap();
        let b = init_weights(&[784, 16, 784], &acts, 3).unwrap();
        assert_eq!(a, b);
        let c = init_weights(&[784, 16, 784], &acts, 4).unwrap();
        assert_ne!(a, c);
        let limit = glorot_limit(784, 16);
        assert!((limit - 0.0866).abs() < 1e-4);
        for layer in a.layers() {
            assert!(layer.bias.data().iter().all(|&v| v == 0.0));
            assert!(layer.weights.data().iter().all(|w| w.abs() <= limit));
        }
        assert_eq!(a.bottleneck_index(), 1);
        assert_eq!(a.latent_dim(), 16);
    }

    #[test]
    fn init_rejects_bad_sizes() {
        assert!(matches!(init_weights(&[], &[], 0), Err(Error::Config(_))));
        assert!(matches!(init_weights(&[4], &[], 0), Err(Error::Config(_))));
        assert!(init_weights(&[4, 2, 4], &[Activation::Relu], 0).is_err());
        assert!(init_weights(&[4, 2, 3], &[Activation::Relu; 2], 0).is_err());
    }

    #[test]
    fn bottleneck_picks_narrowest_interior_layer() {
        assert_eq!(default_bottleneck(&[10, 6, 3, 6, 10]), 2);
        assert_eq!(default_bottleneck(&[10, 5, 10]), 1);
        assert_eq!(default_bottleneck(&[10, 10]), 1);
        assert_eq!(default_bottleneck(&[8, 4, 2, 2, 4, 8]), 2);
    }

    #[test]
    fn asymmetric_architectures_are_accepted() {
        let arch = Architecture::new(vec![6, 4, 2, 6], Activation::Relu, Activation::Identity);
        let model = arch.build(0).unwrap();
        assert_eq!(model.latent_dim(), 2);
        assert!(!model.is_symmetric());
        assert!(model.clone().tie_weights().is_err());
    }

    #[test]
    fn tied_weights_are_transposes_and_halve_weight_count() {
        let arch = Architecture::new(vec![784, 16, 784], Activation::Relu, Activation::Sigmoid);
        let model = arch.build(1).unwrap();
        let untied = model.parameter_count();
        let tied = model.tie_weights().unwrap();
        assert_eq!(tied.layers()[1].weights, tied.layers()[0].weights.transpose());
        assert_eq!(tied.parameter_count(), 784 * 16 + 16 + 784);
        assert_eq!(untied, 2 * 784 * 16 + 16 + 784);
    }

    #[test]
    fn parse_architecture_strings() {
        assert_eq!(Architecture::parse_sizes("784,16,784").unwrap(), vec![784, 16, 784]);
        assert!(Architecture::parse_sizes("784,,16").is_err());
        assert!(Architecture::parse_sizes("784").is_err());
        assert!(Architecture::parse_sizes("784,16,10").is_err());
        assert!(Architecture::parse_sizes("784,0,784").is_err());
    }
}
