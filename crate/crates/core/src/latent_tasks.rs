//! Brute-force k-nearest-neighbour classification on raw or latent features.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data_io::Dataset;
use crate::error::{Error, Result};
use crate::nn::FfaModel;
use crate::tensor::Matrix;

/// Stored training points; prediction scans all of them.
#[derive(Debug, Clone)]
pub struct KnnModel {
    points: Matrix,
    labels: Vec<u32>,
    k: usize,
}

impl KnnModel {
    pub fn new(points: Matrix, labels: Vec<u32>, k: usize) -> Result<Self> {
        if labels.len() != points.rows() {
            return Err(Error::Consistency(format!(
                "{} labels for {} training points",
                labels.len(),
                points.rows()
            )));
        }
        if k == 0 || k > points.rows() {
            return Err(Error::Config(format!(
                "k must be between 1 and the number of training points ({}), got {k}",
                points.rows()
            )));
        }
        Ok(KnnModel { points, labels, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    /// Indices of the `k` nearest training points, nearest first. Equal
    /// distances keep the smaller index first.
    pub fn neighbours(&self, query: &[f64]) -> Vec<usize> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, p) in self.points.iter_rows().enumerate() {
            let d = squared_distance(p, query);
            if best.len() == self.k && d >= best[self.k - 1].0 {
                continue;
            }
            let at = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(at, (d, i));
            best.truncate(self.k);
        }
        best.into_iter().map(|(_, i)| i).collect()
    }

    /// Majority label among the neighbours of `query`; the smallest label
    /// wins a tied vote.
    pub fn predict_one(&self, query: &[f64]) -> u32 {
        let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
        for i in self.neighbours(query) {
            *votes.entry(self.labels[i]).or_default() += 1;
        }
        let top = votes.values().copied().max().unwrap_or(0);
        votes
            .into_iter()
            .find(|&(_, c)| c == top)
            .map(|(label, _)| label)
            .expect("k >= 1")
    }

    pub fn predict(&self, queries: &Matrix) -> Result<Vec<u32>> {
        if queries.cols() != self.dim() {
            return Err(Error::dimension("knn_predict", queries.shape(), self.points.shape()));
        }
        Ok(queries.iter_rows().map(|q| self.predict_one(q)).collect())
    }
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `counts[truth][predicted]` for labels below `classes`.
pub fn confusion(predicted: &[u32], truth: &[u32], classes: usize) -> Result<Vec<Vec<usize>>> {
    if predicted.len() != truth.len() {
        return Err(Error::Consistency(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    let mut counts = vec![vec![0usize; classes]; classes];
    for (&p, &t) in predicted.iter().zip(truth) {
        let (p, t) = (p as usize, t as usize);
        if p >= classes || t >= classes {
            return Err(Error::Range(format!("label {} outside 0..{classes}", p.max(t))));
        }
        counts[t][p] += 1;
    }
    Ok(counts)
}

/// Fraction of exact matches.
pub fn accuracy(predicted: &[u32], truth: &[u32]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Consistency(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("no test labels".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub accuracy: f64,
    pub train_wall_time: f64,
    pub predict_wall_time: f64,
    pub feature_dim: usize,
    pub threads: usize,
}

/// Fits a kNN classifier and times prediction over the whole test set.
pub fn benchmark(features: &Matrix, labels: &[u32], test_features: &Matrix, test_labels: &[u32], k: usize) -> Result<BenchResult> {
    if test_features.rows() != test_labels.len() {
        return Err(Error::Consistency(format!(
            "{} test labels for {} test rows",
            test_labels.len(),
            test_features.rows()
        )));
    }
    let started = Instant::now();
    let knn = KnnModel::new(features.clone(), labels.to_vec(), k)?;
    let train_wall_time = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let predicted = knn.predict(test_features)?;
    let predict_wall_time = started.elapsed().as_secs_f64();

    Ok(BenchResult {
        accuracy: accuracy(&predicted, test_labels)?,
        train_wall_time,
        predict_wall_time,
        feature_dim: features.cols(),
        threads: 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub raw: BenchResult,
    pub latent: BenchResult,
    /// Time spent encoding train and test sets.
    pub encode_wall_time: f64,
}

impl PipelineReport {
    /// Raw prediction time over latent prediction time.
    pub fn speedup(&self) -> f64 {
        self.raw.predict_wall_time / self.latent.predict_wall_time
    }

    /// Raw minus latent accuracy, in percentage points.
    pub fn accuracy_delta_points(&self) -> f64 {
        100.0 * (self.raw.accuracy - self.latent.accuracy)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", CSV_HEADER)?;
        writeln!(out, "{}", csv_row("raw", &self.raw))?;
        writeln!(out, "{}", csv_row("latent", &self.latent))
    }
}

pub const CSV_HEADER: &str = "input,accuracy,seconds";

/// `input,accuracy,seconds` with accuracy as a percentage to one decimal.
pub fn csv_row(input: &str, result: &BenchResult) -> String {
    format!("{input},{:.1},{:.6}", 100.0 * result.accuracy, result.predict_wall_time)
}

/// Benchmarks kNN on the raw features and on the model's latent codes.
pub fn latent_pipeline(model: &FfaModel, train: &Dataset, test: &Dataset, k: usize) -> Result<PipelineReport> {
    let (train_labels, test_labels) = (train.labels_or_err()?, test.labels_or_err()?);
    let raw = benchmark(&train.features, train_labels, &test.features, test_labels, k)?;

    let started = Instant::now();
    let train_codes = model.encode(&train.features)?;
    let test_codes = model.encode(&test.features)?;
    let encode_wall_time = started.elapsed().as_secs_f64();

    let latent = benchmark(&train_codes, train_labels, &test_codes, test_labels, k)?;
    Ok(PipelineReport {
        raw,
        latent,
        encode_wall_time,
    })
}
