//! Cluster characterization and cross-cluster comparison.
//!
//! Each cluster is summarized from the m rows nearest to its centroid:
//! the mode of every categorical column (ties toward the lexicographically
//! smallest category) and the mean of every numeric column in original
//! units. The comparison metric is a percentage ratio, `100 * a / b`.

use crate::cluster::{nearest_to_centroid, KMeansModel};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::table::{ColumnData, ColumnKind, Table};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Per-cluster mode/mean summary over the nearest-to-centroid rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    pub cluster: usize,
    /// Rows actually summarized; less than the requested m only when the
    /// cluster is smaller than m (full-population fallback).
    pub m_used: usize,
    pub population: usize,
    pub categorical_modes: BTreeMap<String, String>,
    pub numeric_means: BTreeMap<String, f64>,
}

/// Summarize every cluster of `model` from the m nearest-to-centroid rows.
///
/// `table` must align row-for-row with `points` (the matrix the model was
/// fitted on) and should hold decoded categories and unstandardized numeric
/// values so the summary reads in original units. Identifier columns are
/// skipped. A cluster smaller than m falls back to its full population,
/// visible as `m_used < m`.
pub fn summarize_clusters(
    table: &Table,
    model: &KMeansModel,
    points: &Matrix,
    m: usize,
) -> Result<Vec<ClusterSummary>> {
    if m == 0 {
        return Err(Error::Domain("summary m must be positive".to_string()));
    }
    if table.row_count() != points.rows() || model.assignments.len() != points.rows() {
        return Err(Error::Shape(format!(
            "table has {} rows, points {}, assignments {}",
            table.row_count(),
            points.rows(),
            model.assignments.len()
        )));
    }

    let mut summaries = Vec::with_capacity(model.k);
    for cluster in 0..model.k {
        let population = model.assignments.iter().filter(|&&a| a == cluster).count();
        let m_used = m.min(population);
        let rows = nearest_to_centroid(model, points, cluster, m_used)?;

        let mut categorical_modes = BTreeMap::new();
        let mut numeric_means = BTreeMap::new();
        for col in table.columns() {
            if col.kind() == ColumnKind::Identifier {
                continue;
            }
            match col.data() {
                ColumnData::Text(cells) => {
                    if let Some(mode) = mode_of(cells, &rows) {
                        categorical_modes.insert(col.name().to_string(), mode);
                    }
                }
                ColumnData::Numeric(cells) => {
                    let xs: Vec<f64> = rows.iter().filter_map(|&r| cells[r]).collect();
                    if !xs.is_empty() {
                        numeric_means.insert(col.name().to_string(), math::mean(&xs));
                    }
                }
            }
        }
        summaries.push(ClusterSummary {
            cluster,
            m_used,
            population,
            categorical_modes,
            numeric_means,
        });
    }
    Ok(summaries)
}

/// Most frequent present value among the selected rows; ties resolve to the
/// lexicographically smallest category. None when every cell is missing.
fn mode_of(cells: &[Option<String>], rows: &[usize]) -> Option<String> {
    let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
    for &r in rows {
        if let Some(v) = &cells[r] {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    // iteration is lexicographic, so strictly-greater keeps the smallest
    let mut best: Option<(&String, usize)> = None;
    for (cat, n) in counts {
        match best {
            Some((_, bn)) if bn >= n => {}
            _ => best = Some((cat, n)),
        }
    }
    best.map(|(cat, _)| cat.clone())
}

/// Percentage ratio `100 * mean_a / mean_b`.
///
/// Reads as "a is X percent of b"; the increase form is `X - 100`.
pub fn improvement_percent(mean_a: f64, mean_b: f64) -> Result<f64> {
    match mean_b.partial_cmp(&0.0) {
        Some(core::cmp::Ordering::Greater) => Ok(100.0 * mean_a / mean_b),
        _ => Err(Error::Domain(format!(
            "improvement baseline must be positive, got {mean_b}"
        ))),
    }
}
