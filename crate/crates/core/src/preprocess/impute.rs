//! k-nearest-neighbour imputation of missing cells.
//!
//! Row similarity uses a nan-aware Euclidean distance: only features present
//! in both rows contribute, and the sum is rescaled by `D / D_obs` (total
//! feature count over co-observed count) so sparse rows are not artificially
//! close. Every feature is standardized before the distance so large-range
//! columns cannot dominate. Numeric cells are filled with the donor mean;
//! categorical cells (and encoded-categorical columns named in the config)
//! with the donor mode, ties resolved toward the lexicographically smallest
//! category, which for lexicographic codes is the smallest code.

use crate::error::{Error, Result};
use crate::math;
use crate::table::{Column, ColumnData, ColumnKind, Table};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Imputation parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImputeConfig {
    /// Number of donor rows per missing cell.
    pub k: usize,
    /// Numeric columns to fill by donor mode instead of donor mean, for
    /// columns that hold integer category codes. Categorical-kind columns
    /// are always mode-filled.
    pub mode_columns: Vec<String>,
}

impl Default for ImputeConfig {
    fn default() -> Self {
        ImputeConfig {
            k: 5,
            mode_columns: Vec::new(),
        }
    }
}

impl ImputeConfig {
    pub fn new(k: usize) -> Self {
        ImputeConfig {
            k,
            mode_columns: Vec::new(),
        }
    }

    pub fn with_mode_columns(mut self, columns: Vec<String>) -> Self {
        self.mode_columns = columns;
        self
    }
}

/// Fill every missing cell of the non-identifier columns from the k nearest
/// rows that have the cell present. Present cells are never modified; all
/// fills are computed against the original table before any is applied.
pub fn knn_impute(table: &Table, config: &ImputeConfig) -> Result<Table> {
    if config.k == 0 {
        return Err(Error::Domain("impute k must be positive".to_string()));
    }
    let n = table.row_count();
    if n < config.k + 1 {
        return Err(Error::InsufficientData(format!(
            "need at least k+1 = {} rows, table has {n}",
            config.k + 1
        )));
    }

    let feature_cols: Vec<&Column> = table
        .columns()
        .iter()
        .filter(|c| c.kind() != ColumnKind::Identifier)
        .collect();
    for col in &feature_cols {
        if col.present_count() == 0 {
            return Err(Error::UnimputableColumn(col.name().to_string()));
        }
    }

    // Standardized feature matrix used only for distances; None = missing.
    let features = standardized_features(&feature_cols);
    let d_total = features.len();

    let mut filled: BTreeMap<(usize, usize), CellFill> = BTreeMap::new();
    for (ci, col) in feature_cols.iter().enumerate() {
        let use_mode = col.kind() == ColumnKind::Categorical
            || config.mode_columns.iter().any(|m| m == col.name());
        let missing_rows: Vec<usize> = match col.data() {
            ColumnData::Numeric(v) => (0..n).filter(|&r| v[r].is_none()).collect(),
            ColumnData::Text(v) => (0..n).filter(|&r| v[r].is_none()).collect(),
        };
        for row in missing_rows {
            let donors = nearest_donors(&features, d_total, row, ci, config.k)?;
            let fill = if use_mode {
                CellFill::Mode(donor_mode(col, &donors)?)
            } else {
                CellFill::Mean(donor_mean(col, &donors)?)
            };
            filled.insert((row, ci), fill);
        }
    }

    // Apply all fills at once.
    let mut out = table.clone();
    for (ci, col) in feature_cols.iter().enumerate() {
        let fills: Vec<(usize, &CellFill)> = filled
            .iter()
            .filter(|((_, c), _)| *c == ci)
            .map(|((r, _), f)| (*r, f))
            .collect();
        if fills.is_empty() {
            continue;
        }
        let new_col = match col.data() {
            ColumnData::Numeric(v) => {
                let mut cells = v.clone();
                for (r, f) in fills {
                    if let CellFill::Mean(x) = f {
                        cells[r] = Some(*x);
                    } else if let CellFill::Mode(ModeValue::Code(x)) = f {
                        cells[r] = Some(*x);
                    }
                }
                Column::numeric(col.name(), col.role(), cells)?
            }
            ColumnData::Text(v) => {
                let mut cells = v.clone();
                for (r, f) in fills {
                    if let CellFill::Mode(ModeValue::Category(s)) = f {
                        cells[r] = Some(s.clone());
                    }
                }
                Column::categorical(col.name(), col.role(), cells)
            }
        };
        out = out.with_column_replaced(col.name(), new_col)?;
    }
    Ok(out)
}

enum CellFill {
    Mean(f64),
    Mode(ModeValue),
}

enum ModeValue {
    Category(String),
    Code(f64),
}

/// Per-feature standardized values for the distance space. Categorical
/// columns are lexicographically coded first; a zero-variance feature maps
/// every present cell to 0 so it contributes nothing.
fn standardized_features(cols: &[&Column]) -> Vec<Vec<Option<f64>>> {
    cols.iter()
        .map(|col| {
            let raw: Vec<Option<f64>> = match col.data() {
                ColumnData::Numeric(v) => v.clone(),
                ColumnData::Text(v) => {
                    let mut cats: Vec<&String> = v.iter().flatten().collect();
                    cats.sort_unstable();
                    cats.dedup();
                    v.iter()
                        .map(|c| {
                            c.as_ref()
                                .map(|s| cats.binary_search(&s).expect("category present") as f64)
                        })
                        .collect()
                }
            };
            let present: Vec<f64> = raw.iter().flatten().copied().collect();
            let mean = math::mean(&present);
            let std = math::sample_std(&present);
            raw.iter()
                .map(|c| c.map(|x| if std > 0.0 { (x - mean) / std } else { 0.0 }))
                .collect()
        })
        .collect()
}

/// Indices of the k nearest rows to `row` that have feature `target` present,
/// ascending by (distance, row index). Falls back to fewer than k when fewer
/// donors are reachable; zero reachable donors is an unimputable-row error.
fn nearest_donors(
    features: &[Vec<Option<f64>>],
    d_total: usize,
    row: usize,
    target: usize,
    k: usize,
) -> Result<Vec<usize>> {
    let n = features[0].len();
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for other in 0..n {
        if other == row || features[target][other].is_none() {
            continue;
        }
        if let Some(d) = nan_distance(features, d_total, row, other) {
            candidates.push((d, other));
        }
    }
    if candidates.is_empty() {
        return Err(Error::UnimputableRow(row));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    Ok(candidates.into_iter().take(k).map(|(_, i)| i).collect())
}

/// Scaled Euclidean distance over co-observed features; None when the rows
/// share no observed feature.
fn nan_distance(features: &[Vec<Option<f64>>], d_total: usize, a: usize, b: usize) -> Option<f64> {
    let mut sum = 0.0;
    let mut observed = 0usize;
    for feature in features {
        if let (Some(x), Some(y)) = (feature[a], feature[b]) {
            sum += (x - y) * (x - y);
            observed += 1;
        }
    }
    if observed == 0 {
        None
    } else {
        Some(math::sqrt(sum * d_total as f64 / observed as f64))
    }
}

fn donor_mean(col: &Column, donors: &[usize]) -> Result<f64> {
    let values = col.numeric_values()?;
    let xs: Vec<f64> = donors
        .iter()
        .map(|&r| values[r].expect("donor present"))
        .collect();
    Ok(math::mean(&xs))
}

fn donor_mode(col: &Column, donors: &[usize]) -> Result<ModeValue> {
    match col.data() {
        ColumnData::Text(v) => {
            let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
            for &r in donors {
                *counts
                    .entry(v[r].as_ref().expect("donor present"))
                    .or_insert(0) += 1;
            }
            // BTreeMap iterates categories in lexicographic order, so the
            // first maximal count is the lexicographically smallest mode.
            let (cat, _) = counts
                .iter()
                .fold(None::<(&String, usize)>, |best, (c, &n)| match best {
                    Some((_, bn)) if bn >= n => best,
                    _ => Some((c, n)),
                })
                .expect("non-empty donors");
            Ok(ModeValue::Category((*cat).clone()))
        }
        ColumnData::Numeric(v) => {
            let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
            for &r in donors {
                let x = v[r].expect("donor present");
                counts.entry(x.to_bits()).or_insert((x, 0)).1 += 1;
            }
            let mut pairs: Vec<(f64, usize)> = counts.into_values().collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
            let (code, _) = pairs
                .into_iter()
                .fold(None::<(f64, usize)>, |best, (x, n)| match best {
                    Some((_, bn)) if bn >= n => best,
                    _ => Some((x, n)),
                })
                .expect("non-empty donors");
            Ok(ModeValue::Code(code))
        }
    }
}
