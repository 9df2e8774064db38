//! Deterministic label encoding for categorical columns.

use crate::error::{Error, Result};
use crate::table::{Column, ColumnKind, Role, Table};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Fitted category-to-code mapping for one column.
///
/// Codes are dense `0..n_categories` assigned in lexicographic order of the
/// category text, so the mapping is identical across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMap {
    pub column: String,
    categories: Vec<String>,
}

impl EncodingMap {
    /// Fit a mapping from the distinct present values of a cell slice.
    fn fit(column: &str, cells: &[Option<String>]) -> Self {
        let mut categories: Vec<String> = cells.iter().flatten().cloned().collect();
        categories.sort_unstable();
        categories.dedup();
        EncodingMap {
            column: column.to_string(),
            categories,
        }
    }

    pub fn code_of(&self, category: &str) -> Option<usize> {
        self.categories
            .binary_search_by(|c| c.as_str().cmp(category))
            .ok()
    }

    pub fn category_of(&self, code: usize) -> Option<&str> {
        self.categories.get(code).map(String::as_str)
    }

    /// Categories in code order (code = index).
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Rebuild a map from its serialized category list (code = position).
    pub fn from_categories(column: &str, categories: Vec<String>) -> Result<Self> {
        let mut sorted = categories.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != categories {
            return Err(Error::Spec(format!(
                "categories for {column} must be distinct and lexicographically sorted"
            )));
        }
        Ok(EncodingMap {
            column: column.to_string(),
            categories,
        })
    }
}

/// Replace the named categorical columns by integer-code numeric columns.
///
/// Missing cells stay missing; roles are preserved. Decoding through the
/// returned maps is exact.
pub fn encode_labels(table: &Table, columns: &[&str]) -> Result<(Table, Vec<EncodingMap>)> {
    let mut out = table.clone();
    let mut maps = Vec::with_capacity(columns.len());
    for &name in columns {
        let col = table.column(name)?;
        if col.kind() != ColumnKind::Categorical {
            return Err(Error::Kind {
                column: name.to_string(),
                expected: "categorical",
            });
        }
        let cells = col.text_values()?;
        let map = EncodingMap::fit(name, cells);
        let encoded = encode_column(col.role(), name, cells, &map)?;
        out = out.with_column_replaced(name, encoded)?;
        maps.push(map);
    }
    Ok((out, maps))
}

/// Re-apply fitted maps to a table (for held-out data).
///
/// A category unseen at fit time is a schema error rather than a silent
/// new code.
pub fn apply_encoding(table: &Table, maps: &[EncodingMap]) -> Result<Table> {
    let mut out = table.clone();
    for map in maps {
        let col = table.column(&map.column)?;
        let cells = col.text_values()?;
        let encoded = encode_column(col.role(), &map.column, cells, map)?;
        out = out.with_column_replaced(&map.column, encoded)?;
    }
    Ok(out)
}

fn encode_column(
    role: Role,
    name: &str,
    cells: &[Option<String>],
    map: &EncodingMap,
) -> Result<Column> {
    let mut codes = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        match cell {
            None => codes.push(None),
            Some(cat) => match map.code_of(cat) {
                Some(code) => codes.push(Some(code as f64)),
                None => {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: name.to_string(),
                        message: format!("category `{cat}` not in fitted encoding"),
                    })
                }
            },
        }
    }
    Column::numeric(name, role, codes)
}

/// Invert fitted encodings, restoring categorical columns.
pub fn decode_labels(table: &Table, maps: &[EncodingMap]) -> Result<Table> {
    let mut out = table.clone();
    for map in maps {
        let col = table.column(&map.column)?;
        let codes = col.numeric_values()?;
        let mut cells: Vec<Option<String>> = Vec::with_capacity(codes.len());
        for (i, code) in codes.iter().enumerate() {
            match code {
                None => cells.push(None),
                Some(c) => {
                    let idx = *c as usize;
                    if *c < 0.0 || *c != idx as f64 {
                        return Err(Error::Parse {
                            row: i + 1,
                            column: map.column.clone(),
                            message: format!("cell {c} is not an integer code"),
                        });
                    }
                    let cat = map.category_of(idx).ok_or_else(|| Error::Parse {
                        row: i + 1,
                        column: map.column.clone(),
                        message: format!("code {idx} outside fitted encoding"),
                    })?;
                    cells.push(Some(cat.to_string()));
                }
            }
        }
        out = out.with_column_replaced(
            &map.column,
            Column::categorical(&map.column, col.role(), cells),
        )?;
    }
    Ok(out)
}
