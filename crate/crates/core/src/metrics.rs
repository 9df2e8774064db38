//! Train/test splitting and regression error measures.

use crate::error::{Error, Result};
use crate::math;
use crate::rng::SplitMix64;
use crate::table::Table;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

/// How to split a table into train and test parts.
///
/// Test size is `round(n * test_fraction)` (half-up), clamped to
/// `[1, n - 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Result<Self> {
        if !(test_fraction > 0.0 && test_fraction <= 0.5) {
            return Err(Error::Domain(format!(
                "test fraction {test_fraction} outside (0, 0.5]"
            )));
        }
        Ok(SplitSpec {
            test_fraction,
            seed,
        })
    }

    pub fn test_size(&self, n: usize) -> usize {
        let raw = math::floor(n as f64 * self.test_fraction + 0.5) as usize;
        raw.clamp(1, n - 1)
    }
}

/// Deterministic shuffled split into `(train, test)`.
///
/// Rows keep their original relative order within each part; the parts are
/// disjoint and together cover every row.
pub fn train_test_split(table: &Table, spec: &SplitSpec) -> Result<(Table, Table)> {
    let n = table.row_count();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 rows to split, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(spec.seed);
    rng.shuffle(&mut order);

    let test_size = spec.test_size(n);
    let mut test_rows: Vec<usize> = order[..test_size].to_vec();
    let mut train_rows: Vec<usize> = order[test_size..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();

    Ok((table.take_rows(&train_rows)?, table.take_rows(&test_rows)?))
}

/// Regression error triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionMetrics {
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

/// Root mean squared error between predictions and targets.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_lengths(predictions, targets, 1)?;
    let n = predictions.len() as f64;
    let ss: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(h, y)| (h - y) * (h - y))
        .sum();
    Ok(math::sqrt(ss / n))
}

/// Mean absolute error between predictions and targets.
pub fn mae(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_lengths(predictions, targets, 1)?;
    let n = predictions.len() as f64;
    let s: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(h, y)| math::abs(h - y))
        .sum();
    Ok(s / n)
}

/// Coefficient of determination: `1 - SS_res / SS_tot`.
pub fn r2(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_lengths(predictions, targets, 2)?;
    let mean_y = math::mean(targets);
    let ss_tot: f64 = targets.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Domain(
            "R^2 undefined for constant targets".to_string(),
        ));
    }
    let ss_res: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(h, y)| (y - h) * (y - h))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// All three measures at once.
pub fn regression_metrics(predictions: &[f64], targets: &[f64]) -> Result<RegressionMetrics> {
    Ok(RegressionMetrics {
        rmse: rmse(predictions, targets)?,
        mae: mae(predictions, targets)?,
        r2: r2(predictions, targets)?,
    })
}

fn check_lengths(predictions: &[f64], targets: &[f64], min: usize) -> Result<()> {
    if predictions.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.len() < min {
        return Err(Error::InsufficientData(format!(
            "need at least {min} values, got {}",
            predictions.len()
        )));
    }
    Ok(())
}
