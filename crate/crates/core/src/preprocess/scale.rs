//! Column standardization to zero mean and unit sample deviation.

use crate::error::{Error, Result};
use crate::math;
use crate::table::{Column, ColumnKind, Table};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Fitted standardization parameters for one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub column: String,
    pub mean: f64,
    pub std_sample: f64,
}

/// Standardize the named numeric columns: present cells become
/// `(x - mean) / std_sample`; missing cells are untouched.
///
/// A zero-variance column is a [`Error::ConstantColumn`] error so the
/// pipeline driver can drop it with a logged warning instead of dividing
/// by zero.
pub fn standardize(table: &Table, columns: &[&str]) -> Result<(Table, Vec<Standardization>)> {
    let mut out = table.clone();
    let mut params = Vec::with_capacity(columns.len());
    for &name in columns {
        let param = fit_one(table, name)?;
        out = apply_one(&out, &param)?;
        params.push(param);
    }
    Ok((out, params))
}

/// Re-apply fitted parameters (for held-out data).
pub fn apply_standardization(table: &Table, params: &[Standardization]) -> Result<Table> {
    let mut out = table.clone();
    for param in params {
        out = apply_one(&out, param)?;
    }
    Ok(out)
}

fn fit_one(table: &Table, name: &str) -> Result<Standardization> {
    let col = table.column(name)?;
    if col.kind() != ColumnKind::Numeric {
        return Err(Error::Kind {
            column: name.to_string(),
            expected: "numeric",
        });
    }
    let present = col.present_numeric()?;
    if present.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "column {name} has {} present values, need at least 2 to standardize",
            present.len()
        )));
    }
    let mean = math::mean(&present);
    let std_sample = math::sample_std(&present);
    if std_sample == 0.0 {
        return Err(Error::ConstantColumn(name.to_string()));
    }
    Ok(Standardization {
        column: name.to_string(),
        mean,
        std_sample,
    })
}

fn apply_one(table: &Table, param: &Standardization) -> Result<Table> {
    let col = table.column(&param.column)?;
    let values = col.numeric_values()?;
    let scaled: Vec<Option<f64>> = values
        .iter()
        .map(|c| c.map(|x| (x - param.mean) / param.std_sample))
        .collect();
    table.with_column_replaced(
        &param.column,
        Column::numeric(&param.column, col.role(), scaled)?,
    )
}
