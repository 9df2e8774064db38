//! Quantile-based outlier handling: row deletion or winsorizing.

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{Column, ColumnKind, Table};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Fitted trim bounds for one column: the `fraction` and `1 - fraction`
/// linear-interpolation quantiles of its present cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimBounds {
    pub column: String,
    pub lower: f64,
    pub upper: f64,
    pub fraction: f64,
}

/// Drop rows whose present cell in each named column falls strictly outside
/// that column's `[q_fraction, q_(1-fraction)]` interval.
///
/// Columns are processed in the given order, each bound computed on the
/// table as already filtered by the previous columns. Rows with a missing
/// cell in the current column are retained.
pub fn trim_outliers(
    table: &Table,
    columns: &[&str],
    fraction: f64,
) -> Result<(Table, Vec<TrimBounds>)> {
    validate_fraction(fraction)?;
    let mut current = table.clone();
    let mut bounds = Vec::with_capacity(columns.len());
    for &name in columns {
        let b = fit_bounds(&current, name, fraction)?;
        let cells = current.column(name)?.numeric_values()?;
        let keep: Vec<bool> = cells
            .iter()
            .map(|c| match c {
                None => true,
                Some(x) => *x >= b.lower && *x <= b.upper,
            })
            .collect();
        current = current.filter_rows(&keep)?;
        bounds.push(b);
    }
    Ok((current, bounds))
}

/// Clip instead of delete: present cells outside the bounds are replaced by
/// the nearest bound. Row count is preserved.
pub fn winsorize(
    table: &Table,
    columns: &[&str],
    fraction: f64,
) -> Result<(Table, Vec<TrimBounds>)> {
    validate_fraction(fraction)?;
    let mut current = table.clone();
    let mut bounds = Vec::with_capacity(columns.len());
    for &name in columns {
        let b = fit_bounds(&current, name, fraction)?;
        let col = current.column(name)?;
        let clipped: Vec<Option<f64>> = col
            .numeric_values()?
            .iter()
            .map(|c| c.map(|x| x.clamp(b.lower, b.upper)))
            .collect();
        current =
            current.with_column_replaced(name, Column::numeric(name, col.role(), clipped)?)?;
        bounds.push(b);
    }
    Ok((current, bounds))
}

fn validate_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 0.5) {
        return Err(Error::Domain(format!(
            "trim fraction {fraction} outside (0, 0.5)"
        )));
    }
    Ok(())
}

fn fit_bounds(table: &Table, name: &str, fraction: f64) -> Result<TrimBounds> {
    let col = table.column(name)?;
    if col.kind() != ColumnKind::Numeric {
        return Err(Error::Kind {
            column: name.to_string(),
            expected: "numeric",
        });
    }
    let present = col.present_numeric()?;
    if present.is_empty() {
        return Err(Error::InsufficientData(format!(
            "column {name} has no present values left to trim"
        )));
    }
    let lower = stats::quantile(&present, fraction)?;
    let upper = stats::quantile(&present, 1.0 - fraction)?;
    Ok(TrimBounds {
        column: name.to_string(),
        lower,
        upper,
        fraction,
    })
}
