//! Reconstruction error (RE) and RE-based rankings.

use std::io::Write;

use crate::error::{Error, Result};
use crate::loss;
use crate::tensor::Matrix;

/// Dataset-level RE: the MSE `(1/M) Σᵢ |xᵢ − x̃ᵢ|²`.
pub fn dataset_re(x: &Matrix, x_hat: &Matrix) -> Result<f64> {
    loss::mse(x, x_hat)
}

/// Per-observation RE: `(1/n) |xᵢ − x̃ᵢ|²`, the mean squared error over the
/// components of one row.
pub fn per_observation_re(x: &Matrix, x_hat: &Matrix) -> Result<Vec<f64>> {
    if x.shape() != x_hat.shape() {
        return Err(Error::dimension("per_observation_re", x.shape(), x_hat.shape()));
    }
    let n = x.cols() as f64;
    Ok(x.iter_rows()
        .zip(x_hat.iter_rows())
        .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>() / n)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReEntry {
    /// Row index in the scored matrix.
    pub index: usize,
    pub re: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReReport {
    pub entries: Vec<ReEntry>,
    pub sorted_desc: bool,
}

impl ReReport {
    /// Report in input order; entry `i` carries index `i`.
    pub fn from_values(values: &[f64]) -> Self {
        ReReport {
            entries: values
                .iter()
                .enumerate()
                .map(|(index, &re)| ReEntry { index, re })
                .collect(),
            sorted_desc: false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position (0-based) of `index` in the report.
    pub fn rank_of(&self, index: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.index == index)
    }

    pub fn top(&self, k: usize) -> &[ReEntry] {
        &self.entries[..k.min(self.entries.len())]
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }

    /// Writes `index,re` lines with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,re")?;
        for e in &self.entries {
            writeln!(out, "{},{}", e.index, format_real(e.re))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sorts by RE, largest first; equal REs keep ascending index order.
pub fn rank_by_re(report: ReReport) -> ReReport {
    let mut entries = report.entries;
    entries.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.index.cmp(&b.index)));
    ReReport {
        entries,
        sorted_desc: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_pair(rows: usize, cols: usize, seed: u64) -> (Matrix, Matrix) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::from_fn(rows, cols, |_, _| rng.random_range(0.0..1.0));
        let b = Matrix::from_fn(rows, cols, |_, _| rng.random_range(0.0..1.0));
        (a, b)
    }

    #[test]
    fn dataset_re_matches_mse() {
        let (x, y) = random_pair(7, 5, 1);
        assert_eq!(dataset_re(&x, &x).unwrap(), 0.0);
        assert_eq!(
            dataset_re(&x, &y).unwrap().to_bits(),
            loss::mse(&x, &y).unwrap().to_bits()
        );
        let doubled = x.add(&y.sub(&x).unwrap().scale(2.0)).unwrap();
        let ratio = dataset_re(&x, &doubled).unwrap() / dataset_re(&x, &y).unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn per_observation_examples() {
        let (x, _) = random_pair(3, 4, 2);
        assert!(per_observation_re(&x, &x).unwrap().iter().all(|&v| v == 0.0));
        let mut hot = Matrix::zeros(1, 784);
        hot.set(0, 300, 1.0);
        let re = per_observation_re(&Matrix::zeros(1, 784), &hot).unwrap()[0];
        assert!((re - 1.0 / 784.0).abs() < 1e-18);
        assert!((re - 0.001276).abs() < 1e-6);
        assert!(per_observation_re(&x, &Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn per_observation_mean_relates_to_dataset_re() {
        let (x, y) = random_pair(20, 9, 3);
        let per = per_observation_re(&x, &y).unwrap();
        let mean = per.iter().sum::<f64>() / per.len() as f64;
        let total = dataset_re(&x, &y).unwrap();
        assert!((mean * 9.0 - total).abs() / total < 1e-12);
    }

    #[test]
    fn ranking_examples() {
        let ranked = rank_by_re(ReReport::from_values(&[0.01, 0.062, 0.022]));
        assert_eq!(ranked.indices(), vec![1, 2, 0]);
        assert!(ranked.sorted_desc);

        let ties = rank_by_re(ReReport::from_values(&[0.5; 6]));
        assert_eq!(ties.indices(), (0..6).collect::<Vec<_>>());

        let empty = rank_by_re(ReReport::from_values(&[]));
        assert!(empty.is_empty());
    }

    #[test]
    fn csv_format() {
        let report = ReReport::from_values(&[0.062, 0.1]);
        let csv = report.to_csv();
        assert_eq!(csv, "index,re\n0,6.2000000000000000e-2\n1,1.0000000000000001e-1\n");
        for line in csv.lines().skip(1) {
            let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(value == 0.062 || value == 0.1);
        }
    }

    proptest! {
        #[test]
        fn ranking_is_a_permutation(values in prop::collection::vec(0.0f64..1.0, 0..40)) {
            let ranked = rank_by_re(ReReport::from_values(&values));
            let mut seen: Vec<(usize, u64)> = ranked.entries.iter().map(|e| (e.index, e.re.to_bits())).collect();
            seen.sort();
            let expected: Vec<(usize, u64)> = values.iter().enumerate().map(|(i, v)| (i, v.to_bits())).collect();
            prop_assert_eq!(seen, expected);
            for pair in ranked.entries.windows(2) {
                prop_assert!(pair[0].re > pair[1].re || (pair[0].re == pair[1].re && pair[0].index < pair[1].index));
            }
        }

        #[test]
        fn per_observation_invariant_under_column_permutation(seed in 0u64..500) {
            use rand::{seq::SliceRandom, SeedableRng};
            let (x, y) = random_pair(6, 8, seed);
            let mut cols: Vec<usize> = (0..8).collect();
            cols.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc));
            let permute = |m: &Matrix| Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, cols[j]));
            let a = per_observation_re(&x, &y).unwrap();
            let b = per_observation_re(&permute(&x), &permute(&y)).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-15);
            }
        }
    }
}
