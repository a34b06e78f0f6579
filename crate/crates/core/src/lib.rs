//! Feed-forward autoencoders built from scratch on a small dense-matrix core.
//!
//! The crate covers model definition ([`nn`]), the MSE and binary
//! cross-entropy losses ([`loss`]), mini-batch training with hand-written
//! backpropagation ([`train`]), reconstruction-error metrics ([`metrics`]) and
//! the applications built on them: anomaly detection ([`anomaly`]), denoising
//! ([`denoise`]), classification on latent features ([`latent_tasks`]) and the
//! PCA baseline ([`baselines`]). [`data_io`] reads IDX datasets and writes
//! PGM image grids and model files.

pub mod anomaly;
pub mod baselines;
pub mod cli;
pub mod data_io;
pub mod denoise;
pub mod error;
pub mod latent_tasks;
pub mod loss;
pub mod metrics;
pub mod nn;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use loss::LossKind;
pub use nn::{Activation, Architecture, FfaModel, Reconstruct};
pub use tensor::Matrix;
pub use train::{fit, OptimizerKind, TrainConfig, TrainReport};
