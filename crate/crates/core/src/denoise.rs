//! Denoising autoencoders: train on Gaussian-corrupted inputs against clean
//! targets.

use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss;
use crate::nn::{FfaModel, Reconstruct};
use crate::tensor::Matrix;
use crate::train::{self, TrainConfig, TrainReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the additive noise.
    pub scale: f64,
    pub seed: u64,
    /// Interval the corrupted values are clipped to; `None` disables clipping.
    pub clip: Option<(f64, f64)>,
    /// Corrupt once and reuse the same noisy copy in every epoch.
    #[serde(default)]
    pub frozen: bool,
}

impl NoiseSpec {
    /// Clipping to `[0, 1]`, fresh noise every epoch.
    pub fn new(scale: f64, seed: u64) -> Self {
        NoiseSpec {
            scale,
            seed,
            clip: Some((0.0, 1.0)),
            frozen: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("noise scale must be finite and >= 0, got {}", self.scale)));
        }
        if let Some((lo, hi)) = self.clip {
            if !(lo <= hi) {
                return Err(Error::Config(format!("clip bounds out of order: [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Noise seed used for `epoch`.
    pub fn epoch_seed(&self, epoch: usize) -> u64 {
        if self.frozen {
            self.seed
        } else {
            self.seed.wrapping_add(epoch as u64)
        }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::new(0.3, 0)
    }
}

/// `x + scale · N(0, 1)` entrywise, then clipped. Deterministic per seed.
pub fn corrupt(x: &Matrix, spec: &NoiseSpec) -> Matrix {
    if spec.scale == 0.0 {
        return x.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Matrix::from_fn(x.rows(), x.cols(), |_, _| StandardNormal.sample(&mut rng));
    corrupt_with_noise(x, &noise, spec).expect("noise drawn with the input's shape")
}

/// `x + scale · noise`, then clipped, for a caller-supplied standard-normal
/// draw.
pub fn corrupt_with_noise(x: &Matrix, noise: &Matrix, spec: &NoiseSpec) -> Result<Matrix> {
    if x.shape() != noise.shape() {
        return Err(Error::dimension("corrupt", x.shape(), noise.shape()));
    }
    let data = x
        .data()
        .iter()
        .zip(noise.data())
        .map(|(&v, &z)| {
            let noisy = v + spec.scale * z;
            match spec.clip {
                Some((lo, hi)) => noisy.clamp(lo, hi),
                None => noisy,
            }
        })
        .collect();
    Matrix::new(x.rows(), x.cols(), data)
}

/// Trains `model` to map corrupted copies of `clean` back onto `clean`.
///
/// With `frozen` unset the inputs are re-corrupted at the start of every
/// epoch. A zero scale reproduces [`train::fit`] exactly.
pub fn fit_denoiser(model: FfaModel, clean: &Matrix, spec: &NoiseSpec, config: &TrainConfig) -> Result<TrainReport> {
    spec.validate()?;
    if spec.scale == 0.0 {
        return train::fit(model, clean, clean, config);
    }
    let frozen = spec.frozen.then(|| corrupt(clean, spec));
    train::fit_with_inputs(model, clean, config, |epoch| {
        Ok(match &frozen {
            Some(noisy) => Cow::Borrowed(noisy),
            None => Cow::Owned(corrupt(
                clean,
                &NoiseSpec {
                    seed: spec.epoch_seed(epoch),
                    ..*spec
                },
            )),
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseEval {
    /// MSE between the corrupted inputs and the clean data.
    pub mse_noisy: f64,
    /// MSE between the model's output on the corrupted inputs and the clean data.
    pub mse_denoised: f64,
}

impl DenoiseEval {
    pub fn ratio(&self) -> f64 {
        self.mse_denoised / self.mse_noisy
    }

    pub fn improved(&self) -> bool {
        self.mse_denoised < self.mse_noisy
    }
}

/// Corrupts `clean_test` with `spec` and measures how much of the noise the
/// model removes.
pub fn evaluate_denoiser<R: Reconstruct + ?Sized>(model: &R, clean_test: &Matrix, spec: &NoiseSpec) -> Result<(DenoiseEval, Matrix, Matrix)> {
    spec.validate()?;
    let noisy = corrupt(clean_test, spec);
    let denoised = model.reconstruct(&noisy)?;
    let eval = DenoiseEval {
        mse_noisy: loss::mse(clean_test, &noisy)?,
        mse_denoised: loss::mse(clean_test, &denoised)?,
    };
    Ok((eval, noisy, denoised))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Architecture};

    fn patterns(rows: usize) -> Matrix {
        Matrix::from_fn(rows, 8, |i, j| if (i % 4) == j % 4 { 0.9 } else { 0.1 })
    }

    #[test]
    fn zero_scale_is_identity() {
        let x = patterns(5);
        assert_eq!(corrupt(&x, &NoiseSpec::new(0.0, 3)), x);
    }

    #[test]
    fn clipping_bounds() {
        let x = Matrix::row_vector(vec![0.95, 0.05]);
        let noise = Matrix::row_vector(vec![0.4, -0.4]);
        let spec = NoiseSpec::new(1.0, 0);
        assert_eq!(corrupt_with_noise(&x, &noise, &spec).unwrap().data(), &[1.0, 0.0]);
        let open = NoiseSpec { clip: None, ..spec };
        let out = corrupt_with_noise(&x, &noise, &open).unwrap();
        assert!((out.get(0, 0) - 1.35).abs() < 1e-15);

        let noisy = corrupt(&patterns(50), &NoiseSpec::new(2.0, 9));
        assert!(noisy.data().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(noisy.shape(), (50, 8));
    }

    #[test]
    fn half_normal_mean_of_perturbation() {
        let scale = 0.3;
        let x = Matrix::filled(400, 250, 0.5);
        let spec = NoiseSpec {
            clip: None,
            ..NoiseSpec::new(scale, 11)
        };
        let noisy = corrupt(&x, &spec);
        let mean_abs = noisy.data().iter().map(|v| (v - 0.5).abs()).sum::<f64>() / 100_000.0;
        let expected = scale * (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean_abs / expected - 1.0).abs() < 0.02, "{mean_abs} vs {expected}");
    }

    #[test]
    fn seeds_control_the_draw() {
        let x = patterns(6);
        let a = corrupt(&x, &NoiseSpec::new(0.3, 1));
        assert_eq!(a, corrupt(&x, &NoiseSpec::new(0.3, 1)));
        assert_ne!(a, corrupt(&x, &NoiseSpec::new(0.3, 2)));
    }

    #[test]
    fn spec_validation() {
        assert!(NoiseSpec::new(-0.1, 0).validate().is_err());
        assert!(NoiseSpec::new(f64::NAN, 0).validate().is_err());
        let reversed = NoiseSpec {
            clip: Some((1.0, 0.0)),
            ..NoiseSpec::default()
        };
        assert!(reversed.validate().is_err());
        assert!(NoiseSpec::default().validate().is_ok());
    }

    #[test]
    fn evaluation_bounds() {
        let clean = patterns(20);
        let spec = NoiseSpec::new(0.2, 4);
        let identity = |x: &Matrix| Ok(x.clone());
        let (eval, _, _) = evaluate_denoiser(&identity, &clean, &spec).unwrap();
        assert_eq!(eval.mse_noisy, eval.mse_denoised);

        let target = clean.clone();
        let oracle = move |_: &Matrix| Ok(target.clone());
        let (eval, _, _) = evaluate_denoiser(&oracle, &clean, &spec).unwrap();
        assert_eq!(eval.mse_denoised, 0.0);
        assert!(eval.mse_noisy > 0.0);
    }

    fn config(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            batch_size: 16,
            learning_rate: 1e-2,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_scale_fit_matches_plain_fit() {
        let clean = patterns(40);
        let arch = Architecture::new(vec![8, 4, 8], Activation::Relu, Activation::Sigmoid);
        let plain = train::fit(arch.build(5).unwrap(), &clean, &clean, &config(10)).unwrap();
        let denoiser = fit_denoiser(arch.build(5).unwrap(), &clean, &NoiseSpec::new(0.0, 9), &config(10)).unwrap();
        for (a, b) in plain.model.layers().iter().zip(denoiser.model.layers()) {
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.bias, b.bias);
        }
    }

    #[test]
    fn denoiser_learns_to_remove_noise() {
        let clean = patterns(200);
        let arch = Architecture::new(vec![8, 4, 8], Activation::Relu, Activation::Sigmoid);
        let spec = NoiseSpec::new(0.3, 21);
        let report = fit_denoiser(arch.build(2).unwrap(), &clean, &spec, &config(200)).unwrap();
        let again = fit_denoiser(arch.build(2).unwrap(), &clean, &spec, &config(200)).unwrap();
        assert_eq!(report.model.layers()[0].weights, again.model.layers()[0].weights);

        let test_spec = NoiseSpec::new(0.3, 999);
        let (eval, _, _) = evaluate_denoiser(&report.model, &patterns(40), &test_spec).unwrap();
        assert!(eval.improved());
        assert!(eval.ratio() < 0.5, "ratio {}", eval.ratio());

        let frozen = NoiseSpec { frozen: true, ..spec };
        let fixed = fit_denoiser(arch.build(2).unwrap(), &clean, &frozen, &config(20)).unwrap();
        assert_ne!(fixed.model.layers()[0].weights, report.model.layers()[0].weights);
    }
}
