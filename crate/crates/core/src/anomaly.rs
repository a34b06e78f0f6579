//! Anomaly detection by reconstruction error.
//!
//! The procedure: train an autoencoder on (mostly) normal data, compute the
//! per-observation RE on the data to screen, sort descending, and report the
//! observations with the largest RE. To stabilize results, several models
//! can be trained with different seeds and their REs combined by mean or
//! maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, rank_by_re, ReEntry, ReReport};
use crate::nn::{Architecture, Reconstruct};
use crate::tensor::Matrix;
use crate::train::{self, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Mean,
    Max,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregation::Mean),
            "max" => Ok(Aggregation::Max),
            other => Err(Error::Config(format!("unknown aggregation `{other}` (expected mean or max)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyConfig {
    pub ensemble_size: usize,
    pub aggregation: Aggregation,
    pub top_k: usize,
    /// One seed per ensemble member, used for both initialization and shuffling.
    pub seeds: Vec<u64>,
}

impl AnomalyConfig {
    /// `ensemble_size` members seeded `base_seed, base_seed + 1, ...`.
    pub fn with_seeds(ensemble_size: usize, aggregation: Aggregation, top_k: usize, base_seed: u64) -> Self {
        AnomalyConfig {
            ensemble_size,
            aggregation,
            top_k,
            seeds: (0..ensemble_size as u64).map(|i| base_seed.wrapping_add(i)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size == 0 {
            return Err(Error::Config("ensemble size must be at least 1".into()));
        }
        if self.seeds.len() != self.ensemble_size {
            return Err(Error::Config(format!(
                "{} seeds given for an ensemble of {}",
                self.seeds.len(),
                self.ensemble_size
            )));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-observation RE of `data` under every model, combined entrywise.
pub fn score<R: Reconstruct>(models: &[R], data: &Matrix, aggregation: Aggregation) -> Result<Vec<f64>> {
    if models.is_empty() {
        return Err(Error::EmptyInput("scoring needs at least one model".into()));
    }
    let mut combined: Option<Vec<f64>> = None;
    for model in models {
        let re = metrics::per_observation_re(data, &model.reconstruct(data)?)?;
        combined = Some(match combined {
            None => re,
            Some(acc) => acc
                .into_iter()
                .zip(re)
                .map(|(a, b)| match aggregation {
                    Aggregation::Mean => a + b,
                    Aggregation::Max => a.max(b),
                })
                .collect(),
        });
    }
    let mut combined = combined.expect("at least one model");
    if aggregation == Aggregation::Mean && models.len() > 1 {
        let n = models.len() as f64;
        combined.iter_mut().for_each(|v| *v /= n);
    }
    Ok(combined)
}

#[derive(Debug, Clone)]
pub struct AnomalyReport {
    /// Every observation, sorted by aggregated RE (largest first).
    pub ranking: ReReport,
    /// Number of leading entries reported as outliers.
    pub top_k: usize,
    /// Final epoch loss of each ensemble member.
    pub member_losses: Vec<f64>,
}

impl AnomalyReport {
    pub fn outliers(&self) -> &[ReEntry] {
        self.ranking.top(self.top_k)
    }
}

/// Trains the ensemble on `train_data`, scores `eval_data` and ranks it.
///
/// `train_config.shuffle_seed` is replaced by each member's seed.
pub fn detect(
    train_data: &Matrix,
    eval_data: &Matrix,
    architecture: &Architecture,
    train_config: &TrainConfig,
    config: &AnomalyConfig,
) -> Result<(AnomalyReport, Vec<crate::nn::FfaModel>)> {
    config.validate()?;
    train_config.validate()?;
    let mut models = Vec::with_capacity(config.ensemble_size);
    let mut member_losses = Vec::with_capacity(config.ensemble_size);
    for &seed in &config.seeds {
        let member_config = TrainConfig {
            shuffle_seed: seed,
            ..train_config.clone()
        };
        let report = train::fit(architecture.build(seed)?, train_data, train_data, &member_config)?;
        member_losses.push(report.epoch_losses.last().copied().unwrap_or(f64::NAN));
        models.push(report.model);
    }
    let scores = score(&models, eval_data, config.aggregation)?;
    let ranking = rank_by_re(ReReport::from_values(&scores));
    Ok((
        AnomalyReport {
            top_k: config.top_k.min(ranking.len()),
            ranking,
            member_losses,
        },
        models,
    ))
}
