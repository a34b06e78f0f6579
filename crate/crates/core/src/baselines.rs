//! PCA baseline, the linear-autoencoder comparison, and the
//! curse-of-dimensionality calculator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{self, LossKind};
use crate::nn::{Activation, Architecture, Reconstruct};
use crate::tensor::Matrix;
use crate::train::{self, TrainConfig};

/// Centers every column and scales by `1/√M`, so that `x̂ᵀx̂` is the
/// covariance matrix of `x`.
pub fn normalize_pca(x: &Matrix) -> Result<Matrix> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::EmptyInput("cannot normalize an empty matrix".into()));
    }
    let mean = x.column_means()?;
    let s = 1.0 / (x.rows() as f64).sqrt();
    let mut out = x.clone();
    for row in 0..out.rows() {
        for (v, m) in out.row_mut(row).iter_mut().zip(mean.data()) {
            *v = (*v - m) * s;
        }
    }
    Ok(out)
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations. Returns the
/// eigenvalues (unsorted) and the eigenvectors as columns.
pub fn jacobi_eigen(a: &Matrix, tol: f64, max_sweeps: usize) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::dimension("jacobi_eigen", a.shape(), (a.cols(), a.rows())));
    }
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let off = |a: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j) * a.get(i, j);
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..max_sweeps {
        if off(&a) < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Ok(((0..n).map(|i| a.get(i, i)).collect(), v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// `q × n`, orthonormal rows in descending eigenvalue order.
    pub components: Matrix,
    /// All `n` covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `1 × n` column means of the fitted data.
    pub mean: Matrix,
}

impl PcaModel {
    pub fn q(&self) -> usize {
        self.components.rows()
    }

    /// Coordinates of `x` in the component basis.
    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        let centered = x.row_broadcast_add(&self.mean.scale(-1.0))?;
        centered.matmul_transpose(&self.components)
    }
}

/// Top-`q` eigenpairs of the covariance (divisor `M`). Each component's
/// largest-magnitude entry is made positive.
pub fn pca_fit(x: &Matrix, q: usize) -> Result<PcaModel> {
    let n = x.cols();
    if q == 0 || q > n {
        return Err(Error::Config(format!("PCA needs 1 <= q <= {n}, got q = {q}")));
    }
    if x.rows() < 2 {
        return Err(Error::EmptyInput(format!("PCA needs at least 2 observations, got {}", x.rows())));
    }
    let mean = x.column_means()?;
    let xn = normalize_pca(x)?;
    let cov = xn.transpose_matmul(&xn)?;
    let (values, vectors) = jacobi_eigen(&cov, 1e-12, 100)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut components = Matrix::zeros(q, n);
    for (r, &col) in order.iter().take(q).enumerate() {
        let mut vec: Vec<f64> = (0..n).map(|k| vectors.get(k, col)).collect();
        let pivot = vec
            .iter()
            .enumerate()
            .fold(0, |best, (k, v)| if v.abs() > vec[best].abs() { k } else { best });
        if vec[pivot] < 0.0 {
            vec.iter_mut().for_each(|v| *v = -*v);
        }
        components.row_mut(r).copy_from_slice(&vec);
    }
    Ok(PcaModel {
        components,
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        mean,
    })
}

/// `mean + (x − mean) Cᵀ C`.
pub fn pca_reconstruct(model: &PcaModel, x: &Matrix) -> Result<Matrix> {
    model.project(x)?.matmul(&model.components)?.row_broadcast_add(&model.mean)
}

impl Reconstruct for PcaModel {
    fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        pca_reconstruct(self, x)
    }
}

/// Settings for the linear-autoencoder versus PCA comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub q: usize,
    /// Activation of the encoder layer.
    pub encoder: Activation,
    /// Activation of the decoder layer.
    pub decoder: Activation,
    /// Apply [`normalize_pca`] before training.
    pub normalize: bool,
    /// Initialization seed.
    pub seed: u64,
    pub train: TrainConfig,
}

impl EquivalenceConfig {
    pub fn new(q: usize, train: TrainConfig) -> Self {
        EquivalenceConfig {
            q,
            encoder: Activation::Identity,
            decoder: Activation::Identity,
            normalize: true,
            seed: 0,
            train,
        }
    }

    /// Rejects settings under which the autoencoder is not expected to match
    /// PCA.
    pub fn check_conditions(&self) -> Result<()> {
        if self.encoder != Activation::Identity {
            return Err(Error::Config(format!("linear encoder required, got {} encoder", self.encoder)));
        }
        if self.decoder != Activation::Identity {
            return Err(Error::Config(format!("linear decoder required, got {} decoder", self.decoder)));
        }
        if self.train.loss != LossKind::Mse {
            return Err(Error::Config(format!("mse loss required, got {}", self.train.loss)));
        }
        if !self.normalize {
            return Err(Error::Config(
                "centered 1/sqrt(M) input normalization required, normalization disabled".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub ae_mse: f64,
    pub pca_mse: f64,
    /// `ae_mse / pca_mse`; expected to approach 1.
    pub ratio: f64,
    pub final_loss: f64,
}

impl EquivalenceReport {
    pub fn within(&self, tolerance: f64) -> bool {
        (self.ratio - 1.0).abs() < tolerance
    }
}

/// Trains an `(n, q, n)` linear autoencoder on the normalized data and
/// compares its reconstruction MSE with that of `q`-component PCA.
pub fn linear_ae_vs_pca(data: &Matrix, config: &EquivalenceConfig) -> Result<EquivalenceReport> {
    config.check_conditions()?;
    let n = data.cols();
    if config.q == 0 || config.q > n {
        return Err(Error::Config(format!("need 1 <= q <= {n}, got q = {}", config.q)));
    }
    let x = normalize_pca(data)?;
    let arch = Architecture::new(vec![n, config.q, n], config.encoder, config.decoder);
    let report = train::fit(arch.build(config.seed)?, &x, &x, &config.train)?;
    let ae_mse = loss::mse(&x, &report.model.reconstruct(&x)?)?;
    let pca = pca_fit(&x, config.q)?;
    let pca_mse = loss::mse(&x, &pca_reconstruct(&pca, &x)?)?;
    Ok(EquivalenceReport {
        ae_mse,
        pca_mse,
        ratio: ae_mse / pca_mse,
        final_loss: report.epoch_losses.last().copied().unwrap_or(f64::NAN),
    })
}

/// Zero-mean Gaussian data with independent coordinates of the given
/// standard deviations, rotated by a fixed orthogonal mix so the
/// covariance is not diagonal.
pub fn anisotropic_gaussian(samples: usize, std_devs: &[f64], seed: u64) -> Matrix {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let n = std_devs.len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let raw = Matrix::from_fn(samples, n, |_, j| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z * std_devs[j]
    });
    // Householder reflection I - 2vvᵀ/(vᵀv) with v = (1, 2, ..., n).
    let v: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let h = Matrix::from_fn(n, n, |i, j| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / vv);
    raw.matmul(&h).expect("square mix")
}

/// Edge of the smallest sub-cube of `[0, 1]^d` expected to hold one of `m`
/// uniformly spread points: `(1/m)^(1/d)`.
pub fn curse_length(m: u64, d: u32) -> Result<f64> {
    if m == 0 || d == 0 {
        return Err(Error::Config(format!("curse_length needs m >= 1 and d >= 1, got m = {m}, d = {d}")));
    }
    Ok((1.0 / m as f64).powf(1.0 / f64::from(d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    /// `m / 10^d`, or 0 when that is below the smallest normal `f64`.
    pub value: f64,
    /// `log10(m) − d`, always finite.
    pub log10: f64,
    pub underflow: bool,
}

/// Expected number of the `m` points inside a cell of edge `1/10` in
/// `[0, 1]^d`: `m / 10^d`.
pub fn expected_in_cell(m: u64, d: u32) -> Result<CellEstimate> {
    if m == 0 || d == 0 {
        return Err(Error::Config(format!("expected_in_cell needs m >= 1 and d >= 1, got m = {m}, d = {d}")));
    }
    let log10 = (m as f64).log10() - f64::from(d);
    let value = m as f64 / 10f64.powi(d.min(i32::MAX as u32) as i32);
    let underflow = !value.is_normal();
    Ok(CellEstimate {
        value: if underflow { 0.0 } else { value },
        log10,
        underflow,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurseResult {
    pub d: u32,
    pub m: u64,
    pub l: f64,
    pub expected_in_cell: CellEstimate,
}

pub fn curse(m: u64, d: u32) -> Result<CurseResult> {
    Ok(CurseResult {
        d,
        m,
        l: curse_length(m, d)?,
        expected_in_cell: expected_in_cell(m, d)?,
    })
}
