//! Column-oriented data model.
//!
//! A [`Table`] owns an ordered list of named columns of equal length. Cells
//! are optional: a `None` cell is an explicitly missing value, never a NaN
//! sentinel. Tables are immutable after construction; transformations return
//! new tables.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// What a column stores and how it participates in numeric computation.
///
/// Identifier columns are excluded from all numeric computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Identifier,
}

impl ColumnKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Identifier => "identifier",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(ColumnKind::Numeric),
            "categorical" => Ok(ColumnKind::Categorical),
            "identifier" => Ok(ColumnKind::Identifier),
            other => Err(Error::Schema(format!("unknown column kind `{other}`"))),
        }
    }
}

/// Modelling role of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Independent,
    Dependent,
    Identifier,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Independent => "independent",
            Role::Dependent => "dependent",
            Role::Identifier => "identifier",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "independent" => Ok(Role::Independent),
            "dependent" => Ok(Role::Dependent),
            "identifier" => Ok(Role::Identifier),
            other => Err(Error::Schema(format!("unknown column role `{other}`"))),
        }
    }
}

/// Cell storage; homogeneous per column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Text(Vec<Option<String>>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }
}

/// A named, typed column of optional cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    kind: ColumnKind,
    role: Role,
    data: ColumnData,
}

impl Column {
    /// Numeric column. Present cells must be finite; missingness is explicit.
    pub fn numeric(name: &str, role: Role, values: Vec<Option<f64>>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: name.to_string(),
                        message: "non-finite numeric cell".to_string(),
                    });
                }
            }
        }
        Ok(Column {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            role,
            data: ColumnData::Numeric(values),
        })
    }

    pub fn categorical(name: &str, role: Role, values: Vec<Option<String>>) -> Self {
        Column {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            role,
            data: ColumnData::Text(values),
        }
    }

    pub fn identifier(name: &str, values: Vec<Option<String>>) -> Self {
        Column {
            name: name.to_string(),
            kind: ColumnKind::Identifier,
            role: Role::Identifier,
            data: ColumnData::Text(values),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.kind
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of present (non-missing) cells.
    pub fn present_count(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.iter().filter(|c| c.is_some()).count(),
            ColumnData::Text(v) => v.iter().filter(|c| c.is_some()).count(),
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    /// Numeric cells, or a kind error for text columns.
    pub fn numeric_values(&self) -> Result<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Text(_) => Err(Error::Kind {
                column: self.name.clone(),
                expected: "numeric",
            }),
        }
    }

    /// Text cells, or a kind error for numeric columns.
    pub fn text_values(&self) -> Result<&[Option<String>]> {
        match &self.data {
            ColumnData::Text(v) => Ok(v),
            ColumnData::Numeric(_) => Err(Error::Kind {
                column: self.name.clone(),
                expected: "categorical",
            }),
        }
    }

    /// Present numeric values in row order.
    pub fn present_numeric(&self) -> Result<Vec<f64>> {
        Ok(self.numeric_values()?.iter().flatten().copied().collect())
    }

    pub(crate) fn filter(&self, keep: &[bool]) -> Column {
        debug_assert_eq!(keep.len(), self.len());
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(
                v.iter()
                    .zip(keep)
                    .filter(|(_, k)| **k)
                    .map(|(c, _)| *c)
                    .collect(),
            ),
            ColumnData::Text(v) => ColumnData::Text(
                v.iter()
                    .zip(keep)
                    .filter(|(_, k)| **k)
                    .map(|(c, _)| c.clone())
                    .collect(),
            ),
        };
        Column {
            name: self.name.clone(),
            kind: self.kind,
            role: self.role,
            data,
        }
    }

    pub(crate) fn take_rows(&self, rows: &[usize]) -> Column {
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Text(v) => ColumnData::Text(rows.iter().map(|&i| v[i].clone()).collect()),
        };
        Column {
            name: self.name.clone(),
            kind: self.kind,
            role: self.role,
            data,
        }
    }
}

/// An immutable table of equal-length columns with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    row_count: usize,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let row_count = columns.first().map_or(0, Column::len);
        for col in &columns {
            if col.len() != row_count {
                return Err(Error::Shape(format!(
                    "column {} has {} rows, expected {row_count}",
                    col.name(),
                    col.len()
                )));
            }
        }
        for (i, a) in columns.iter().enumerate() {
            for b in &columns[i + 1..] {
                if a.name() == b.name() {
                    return Err(Error::Schema(format!("duplicate column name {}", a.name())));
                }
            }
        }
        Ok(Table { columns, row_count })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    /// New table with the named column replaced in place (same position).
    pub fn with_column_replaced(&self, name: &str, column: Column) -> Result<Table> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::Lookup(name.to_string()))?;
        if column.len() != self.row_count {
            return Err(Error::Shape(format!(
                "replacement column {} has {} rows, expected {}",
                column.name(),
                column.len(),
                self.row_count
            )));
        }
        let mut columns = self.columns.clone();
        columns[idx] = column;
        Table::new(columns)
    }

    /// Rows where `keep` is true, preserving order.
    pub fn filter_rows(&self, keep: &[bool]) -> Result<Table> {
        if keep.len() != self.row_count {
            return Err(Error::Shape(format!(
                "mask has {} entries, expected {}",
                keep.len(),
                self.row_count
            )));
        }
        let columns = self.columns.iter().map(|c| c.filter(keep)).collect();
        Table::new(columns)
    }

    /// Subset of rows by index, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Result<Table> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.row_count) {
            return Err(Error::Shape(format!(
                "row index {bad} out of range for {} rows",
                self.row_count
            )));
        }
        let columns = self.columns.iter().map(|c| c.take_rows(rows)).collect();
        Table::new(columns)
    }

    /// Names of columns matching a predicate, in table order.
    pub fn names_where<F: Fn(&Column) -> bool>(&self, pred: F) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| pred(c))
            .map(|c| c.name().to_string())
            .collect()
    }
}

/// Count of rows where the dependent column's cell is present.
pub fn record_count_for_target(table: &Table, dependent: &str) -> Result<usize> {
    Ok(table.column(dependent)?.present_count())
}
