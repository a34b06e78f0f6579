//! Mean squared error and binary cross-entropy with analytic gradients.
//!
//! Both losses take `(x, x̃)`: targets first, predictions second, and
//! average over the `M` rows (observations). Cross-entropy sums over the
//! components of each row without dividing by the row width, and uses the
//! natural logarithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Predictions are clamped to `[BCE_EPS, 1 - BCE_EPS]` in the clamped variants,
/// and the strict gradient refuses predictions outside that band.
pub const BCE_EPS: f64 = 1e-12;

const NORMALIZATION_HINT: &str =
    "binary cross-entropy needs inputs normalized to [0, 1] (divide pixel values by 255) and a sigmoid output layer";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Mse,
    Bce,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::Bce => "bce",
        }
    }

    /// Loss value; cross-entropy in strict mode.
    pub fn value(self, x: &Matrix, x_hat: &Matrix) -> Result<f64> {
        match self {
            LossKind::Mse => mse(x, x_hat),
            LossKind::Bce => bce(x, x_hat),
        }
    }

    /// Gradient with respect to `x_hat`; cross-entropy in strict mode.
    pub fn gradient(self, x: &Matrix, x_hat: &Matrix) -> Result<Matrix> {
        match self {
            LossKind::Mse => mse_grad(x, x_hat),
            LossKind::Bce => bce_grad(x, x_hat),
        }
    }

    /// Checks that targets satisfy the loss's domain (cross-entropy: `[0, 1]`).
    pub fn check_targets(self, x: &Matrix) -> Result<()> {
        match self {
            LossKind::Mse => Ok(()),
            LossKind::Bce => check_bce_targets(x),
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(LossKind::Mse),
            "bce" => Ok(LossKind::Bce),
            other => Err(Error::Config(format!("unknown loss `{other}` (expected mse or bce)"))),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_pair(op: &'static str, x: &Matrix, x_hat: &Matrix) -> Result<()> {
    if x.shape() != x_hat.shape() {
        return Err(Error::dimension(op, x.shape(), x_hat.shape()));
    }
    if x.rows() == 0 {
        return Err(Error::EmptyInput(format!("{op} over zero observations")));
    }
    Ok(())
}

/// `(1/M) Σᵢ |xᵢ − x̃ᵢ|²`.
pub fn mse(x: &Matrix, x_hat: &Matrix) -> Result<f64> {
    check_pair("mse", x, x_hat)?;
    let total: f64 = x
        .data()
        .iter()
        .zip(x_hat.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(total / x.rows() as f64)
}

/// Entry `(i, j)` is `−(2/M)(x_ij − x̃_ij)`.
pub fn mse_grad(x: &Matrix, x_hat: &Matrix) -> Result<Matrix> {
    check_pair("mse_grad", x, x_hat)?;
    let c = -2.0 / x.rows() as f64;
    x.sub(x_hat).map(|d| d.map(|v| c * v))
}

fn check_bce_targets(x: &Matrix) -> Result<()> {
    if let Some(v) = x.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("target value {v} outside [0, 1]; {NORMALIZATION_HINT}")));
    }
    Ok(())
}

fn check_bce_predictions(x_hat: &Matrix, lo: f64, hi: f64) -> Result<()> {
    if let Some(v) = x_hat.data().iter().find(|v| !(lo..=hi).contains(*v)) {
        return Err(Error::Domain(format!(
            "prediction {v} outside [{lo:e}, 1 - {:e}]; {NORMALIZATION_HINT}",
            1.0 - hi
        )));
    }
    Ok(())
}

fn bce_sum(x: &Matrix, x_hat: &Matrix, clamp: bool) -> f64 {
    x.data()
        .iter()
        .zip(x_hat.data())
        .map(|(&t, &p)| {
            let p = if clamp { p.clamp(BCE_EPS, 1.0 - BCE_EPS) } else { p };
            t * p.ln() + (1.0 - t) * (1.0 - p).ln()
        })
        .sum()
}

/// `−(1/M) Σᵢ Σⱼ [x log x̃ + (1−x) log(1−x̃)]`. Predictions must lie strictly
/// inside `(0, 1)`.
pub fn bce(x: &Matrix, x_hat: &Matrix) -> Result<f64> {
    check_pair("bce", x, x_hat)?;
    check_bce_targets(x)?;
    if let Some(v) = x_hat.data().iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(Error::Domain(format!(
            "prediction {v} outside (0, 1); {NORMALIZATION_HINT}"
        )));
    }
    Ok(-bce_sum(x, x_hat, false) / x.rows() as f64)
}

/// Cross-entropy with predictions clamped to `[1e-12, 1 − 1e-12]`.
pub fn bce_clamped(x: &Matrix, x_hat: &Matrix) -> Result<f64> {
    check_pair("bce", x, x_hat)?;
    check_bce_targets(x)?;
    Ok(-bce_sum(x, x_hat, true) / x.rows() as f64)
}

/// Entry is `−(1/M)(x − x̃)/(x̃ − x̃²)`. Predictions outside
/// `[1e-12, 1 − 1e-12]` are a domain error.
pub fn bce_grad(x: &Matrix, x_hat: &Matrix) -> Result<Matrix> {
    check_pair("bce_grad", x, x_hat)?;
    check_bce_targets(x)?;
    check_bce_predictions(x_hat, BCE_EPS, 1.0 - BCE_EPS)?;
    Ok(bce_grad_unchecked(x, x_hat))
}

/// Gradient of [`bce_clamped`].
pub fn bce_grad_clamped(x: &Matrix, x_hat: &Matrix) -> Result<Matrix> {
    check_pair("bce_grad", x, x_hat)?;
    check_bce_targets(x)?;
    Ok(bce_grad_unchecked(x, &x_hat.map(|p| p.clamp(BCE_EPS, 1.0 - BCE_EPS))))
}

fn bce_grad_unchecked(x: &Matrix, x_hat: &Matrix) -> Matrix {
    let c = -1.0 / x.rows() as f64;
    let data = x
        .data()
        .iter()
        .zip(x_hat.data())
        .map(|(&t, &p)| c * (t - p) / (p - p * p))
        .collect();
    Matrix::new(x.rows(), x.cols(), data).expect("same shape as inputs")
}

/// One component's grid scan in [`verify_minimum`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMinimum {
    pub target: f64,
    /// Grid point with the smallest loss.
    pub argmin: f64,
    pub spacing: f64,
    pub min_loss: f64,
    /// `L(g₋) − 2L(g) + L(g₊)` around the argmin; `None` when the argmin is a
    /// grid endpoint.
    pub second_difference: Option<f64>,
}

impl ComponentMinimum {
    /// The argmin is the grid point nearest the target.
    pub fn argmin_is_nearest(&self) -> bool {
        (self.argmin - self.target).abs() <= self.spacing / 2.0 + 1e-12
    }

    pub fn confirmed(&self) -> bool {
        self.argmin_is_nearest() && self.second_difference.is_none_or(|d| d > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimumReport {
    pub loss: LossKind,
    pub components: Vec<ComponentMinimum>,
}

impl MinimumReport {
    pub fn confirmed(&self) -> bool {
        self.components.iter().all(ComponentMinimum::confirmed)
    }
}

/// Grid of `points` predictions used to scan a loss. MSE uses the closed
/// interval `[0, 1]`; cross-entropy the open interval, `k/(points+1)`.
pub fn scan_grid(loss: LossKind, points: usize) -> Vec<f64> {
    match loss {
        LossKind::Mse => {
            let denom = (points.max(2) - 1) as f64;
            (0..points).map(|i| i as f64 / denom).collect()
        }
        LossKind::Bce => {
            let denom = (points + 1) as f64;
            (1..=points).map(|i| i as f64 / denom).collect()
        }
    }
}

/// Scans each component of `x̃` over a grid (other components held at the
/// target) and reports where the loss is smallest and whether it curves
/// upwards there.
pub fn verify_minimum(loss: LossKind, x: &[f64], grid: usize) -> Result<MinimumReport> {
    if grid < 3 {
        return Err(Error::Config(format!("a minimum scan needs at least 3 grid points, got {grid}")));
    }
    let target = Matrix::row_vector(x.to_vec());
    loss.check_targets(&target)?;
    let points = scan_grid(loss, grid);
    let spacing = points[1] - points[0];
    let mut components = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        // keep the other components away from the log poles at 0 and 1
        let mut prediction = target.map(|v| v.clamp(BCE_EPS, 1.0 - BCE_EPS));
        let values: Vec<f64> = points
            .iter()
            .map(|&g| {
                prediction.set(0, j, g);
                loss.value(&target, &prediction)
            })
            .collect::<Result<_>>()?;
        let (best, &min_loss) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid has points");
        let second_difference = (best > 0 && best + 1 < values.len())
            .then(|| values[best - 1] - 2.0 * values[best] + values[best + 1]);
        components.push(ComponentMinimum {
            target: x[j],
            argmin: points[best],
            spacing,
            min_loss,
            second_difference,
        });
    }
    Ok(MinimumReport { loss, components })
}
