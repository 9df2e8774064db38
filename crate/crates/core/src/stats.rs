//! Per-column moment statistics and quantiles.
//!
//! Population skewness and kurtosis are the plain moment ratios
//! `m3 / m2^(3/2)` and `m4 / m2^2` over central moments with an `n`
//! denominator. The sample-adjusted variants carry the usual bias
//! corrections and are reported alongside, so both conventions are always
//! visible. Missing cells are excluded before any computation.

use crate::error::{Error, Result};
use crate::math;
use crate::table::{ColumnKind, Table};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Moment statistics for one numeric column.
///
/// `skewness_sample` needs at least 3 present values and
/// `kurtosis_excess_sample` at least 4; below that they are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub name: String,
    pub count_present: usize,
    pub mean: f64,
    pub std_sample: f64,
    pub min: f64,
    pub max: f64,
    pub skewness_population: f64,
    pub skewness_sample: Option<f64>,
    pub kurtosis_population: f64,
    pub kurtosis_excess_sample: Option<f64>,
}

/// Moment statistics over the present cells of a numeric column.
pub fn column_stats(table: &Table, name: &str) -> Result<ColumnStats> {
    let col = table.column(name)?;
    if col.kind() != ColumnKind::Numeric {
        return Err(Error::Kind {
            column: name.to_string(),
            expected: "numeric",
        });
    }
    let xs = col.present_numeric()?;
    stats_of_values(name, &xs)
}

/// Moment statistics of a raw value slice (no missing markers).
pub fn stats_of_values(name: &str, xs: &[f64]) -> Result<ColumnStats> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "column {name} has {n} present values, need at least 2"
        )));
    }
    let mean = math::mean(xs);
    let m2 = central_moment(xs, mean, 2);
    if m2 == 0.0 {
        return Err(Error::UndefinedMoments(name.to_string()));
    }
    let m3 = central_moment(xs, mean, 3);
    let m4 = central_moment(xs, mean, 4);

    let g1 = m3 / math::pow(m2, 1.5);
    let g2 = m4 / (m2 * m2);

    let nf = n as f64;
    let skewness_sample = if n >= 3 {
        Some(math::sqrt(nf * (nf - 1.0)) / (nf - 2.0) * g1)
    } else {
        None
    };
    let kurtosis_excess_sample = if n >= 4 {
        Some((nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * (g2 - 3.0) + 6.0))
    } else {
        None
    };

    let mut min = xs[0];
    let mut max = xs[0];
    for &x in xs {
        if x < min {
            min = x;
        }
        if x > max {
            max = x;
        }
    }

    Ok(ColumnStats {
        name: name.to_string(),
        count_present: n,
        mean,
        std_sample: math::sqrt(m2 * nf / (nf - 1.0)),
        min,
        max,
        skewness_population: g1,
        skewness_sample,
        kurtosis_population: g2,
        kurtosis_excess_sample,
    })
}

fn central_moment(xs: &[f64], mean: f64, order: u32) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .map(|&x| {
            let d = x - mean;
            match order {
                2 => d * d,
                3 => d * d * d,
                4 => d * d * d * d,
                _ => math::pow(d, order as f64),
            }
        })
        .sum::<f64>()
        / n
}

/// Linear-interpolation quantile (the "type 7" rule) on a sorted slice.
///
/// `q` in [0, 1]; the slice must be non-empty and ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = math::floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Linear-interpolation quantile of an unsorted slice.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "quantile of an empty slice".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level {q} outside [0, 1]")));
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(quantile_sorted(&sorted, q))
}
