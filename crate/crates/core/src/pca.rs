//! Principal component analysis via an in-repo one-sided Jacobi SVD.
//!
//! The data matrix is centered and its right singular vectors computed by
//! cyclically orthogonalizing column pairs with Givens rotations. No
//! external linear algebra backend is involved, so results are identical
//! on every platform. Eigenvalues are squared singular values divided by
//! `n - 1`.
//!
//! Sign convention: within each component the largest-magnitude loading is
//! made positive (ties break toward the lowest feature index), so fitted
//! models and the plots derived from them are reproducible.

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::table::{ColumnKind, Table};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// A fitted PCA basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub feature_names: Vec<String>,
    pub center: Vec<f64>,
    /// p x p; row i holds the loadings of component i.
    pub components: Matrix,
    /// Eigenvalues, descending.
    pub explained_variance: Vec<f64>,
    /// Eigenvalues divided by total variance; sums to 1.
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }
}

/// Fit a PCA model on the named numeric columns.
///
/// Columns must be complete (impute first) with at least two rows and
/// nonzero total variance.
pub fn fit_pca(table: &Table, columns: &[&str]) -> Result<PcaModel> {
    let names: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
    let x = dense_matrix(table, columns)?;
    fit_pca_matrix(&x, &names)
}

/// Fit directly on a dense matrix whose columns follow `names`.
pub fn fit_pca_matrix(x: &Matrix, names: &[String]) -> Result<PcaModel> {
    let n = x.rows();
    let p = x.cols();
    if p == 0 {
        return Err(Error::InsufficientData("no feature columns".to_string()));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 rows to fit, got {n}"
        )));
    }
    if names.len() != p {
        return Err(Error::Shape(format!(
            "{} feature names for {p} columns",
            names.len()
        )));
    }

    let mut center = vec![0.0; p];
    for (j, c) in center.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..n {
            s += x.get(i, j);
        }
        *c = s / n as f64;
    }

    // centered data as columns
    let mut cols: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| x.get(i, j) - center[j]).collect())
        .collect();

    let mut v = identity_columns(p);
    jacobi_orthogonalize(&mut cols, &mut v);

    // singular values and ordering
    let mut order: Vec<usize> = (0..p).collect();
    let sq_norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();
    order.sort_by(|&a, &b| sq_norms[b].partial_cmp(&sq_norms[a]).expect("finite"));

    let denom = (n - 1) as f64;
    let explained_variance: Vec<f64> = order.iter().map(|&j| sq_norms[j] / denom).collect();
    let total: f64 = explained_variance.iter().sum();
    if total == 0.0 {
        return Err(Error::Domain(
            "insufficient variance: all rows identical".to_string(),
        ));
    }
    let explained_variance_ratio: Vec<f64> =
        explained_variance.iter().map(|ev| ev / total).collect();

    // components: row i = right singular vector of the i-th largest value
    let mut components = Matrix::zeros(p, p);
    for (i, &j) in order.iter().enumerate() {
        for (f, &value) in v[j].iter().enumerate() {
            components.set(i, f, value);
        }
    }
    apply_sign_convention(&mut components);

    Ok(PcaModel {
        feature_names: names.to_vec(),
        center,
        components,
        explained_variance,
        explained_variance_ratio,
    })
}

/// Project rows of `table` onto the first `q` components.
pub fn project(model: &PcaModel, table: &Table, q: usize) -> Result<Matrix> {
    let columns: Vec<&str> = model.feature_names.iter().map(String::as_str).collect();
    let x = dense_matrix(table, &columns).map_err(|e| match e {
        Error::Lookup(name) => Error::Schema(format!("table lacks model feature {name}")),
        other => other,
    })?;
    project_matrix(model, &x, q)
}

/// Project a dense matrix already in model feature order.
pub fn project_matrix(model: &PcaModel, x: &Matrix, q: usize) -> Result<Matrix> {
    let p = model.n_features();
    if q == 0 || q > p {
        return Err(Error::Cardinality(format!(
            "requested {q} components from a {p}-component model"
        )));
    }
    if x.cols() != p {
        return Err(Error::Schema(format!(
            "data has {} features, model expects {p}",
            x.cols()
        )));
    }
    let mut scores = Matrix::zeros(x.rows(), q);
    for i in 0..x.rows() {
        for c in 0..q {
            let mut s = 0.0;
            for f in 0..p {
                s += (x.get(i, f) - model.center[f]) * model.components.get(c, f);
            }
            scores.set(i, c, s);
        }
    }
    Ok(scores)
}

/// Map `q`-component scores back to feature space.
pub fn reconstruct(model: &PcaModel, scores: &Matrix) -> Result<Matrix> {
    let p = model.n_features();
    let q = scores.cols();
    if q > p {
        return Err(Error::Shape(format!("{q} score columns for {p} features")));
    }
    let mut out = Matrix::zeros(scores.rows(), p);
    for i in 0..scores.rows() {
        for f in 0..p {
            let mut s = model.center[f];
            for c in 0..q {
                s += scores.get(i, c) * model.components.get(c, f);
            }
            out.set(i, f, s);
        }
    }
    Ok(out)
}

/// Smallest q whose cumulative explained-variance ratio reaches `threshold`.
///
/// `threshold` must lie in (0, 1]; q = p always satisfies threshold 1.
pub fn components_for_threshold(model: &PcaModel, threshold: f64) -> usize {
    assert!(
        threshold > 0.0 && threshold <= 1.0,
        "threshold {threshold} outside (0, 1]"
    );
    let mut cum = 0.0;
    for (i, r) in model.explained_variance_ratio.iter().enumerate() {
        cum += r;
        if cum >= threshold {
            return i + 1;
        }
    }
    model.n_features()
}

/// First-two-component scores plus per-feature loading arrows scaled by the
/// square roots of the leading eigenvalues (biplot geometry).
pub fn biplot_data(model: &PcaModel, table: &Table) -> Result<(Matrix, Matrix)> {
    let p = model.n_features();
    if p < 2 {
        return Err(Error::Cardinality(format!(
            "biplot needs at least 2 features, model has {p}"
        )));
    }
    let scores = project(model, table, 2)?;
    Ok((scores, biplot_loadings(model)))
}

/// The loading-arrow half of [`biplot_data`], for callers that already hold
/// projected scores. Requires at least two components.
pub fn biplot_loadings(model: &PcaModel) -> Matrix {
    let p = model.n_features();
    assert!(p >= 2, "biplot loadings need at least 2 features");
    let s0 = math::sqrt(model.explained_variance[0]);
    let s1 = math::sqrt(model.explained_variance[1]);
    let mut loadings = Matrix::zeros(p, 2);
    for f in 0..p {
        loadings.set(f, 0, model.components.get(0, f) * s0);
        loadings.set(f, 1, model.components.get(1, f) * s1);
    }
    loadings
}

/// Dense matrix of complete numeric columns, in the given order.
fn dense_matrix(table: &Table, columns: &[&str]) -> Result<Matrix> {
    let n = table.row_count();
    let p = columns.len();
    let mut out = Matrix::zeros(n, p);
    for (j, &name) in columns.iter().enumerate() {
        let col = table.column(name)?;
        if col.kind() != ColumnKind::Numeric {
            return Err(Error::Kind {
                column: name.to_string(),
                expected: "numeric",
            });
        }
        for (i, cell) in col.numeric_values()?.iter().enumerate() {
            match cell {
                Some(x) => out.set(i, j, *x),
                None => {
                    return Err(Error::InsufficientData(format!(
                        "column {name} has a missing cell at row {}; impute before fitting",
                        i + 1
                    )))
                }
            }
        }
    }
    Ok(out)
}

fn identity_columns(p: usize) -> Vec<Vec<f64>> {
    (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// One-sided Jacobi: rotate column pairs of `cols` until all are mutually
/// orthogonal, accumulating the same rotations into `v`.
fn jacobi_orthogonalize(cols: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let p = cols.len();
    let eps = 1e-14;
    let max_sweeps = 120;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let alpha: f64 = cols[i].iter().map(|x| x * x).sum();
                let beta: f64 = cols[j].iter().map(|x| x * x).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                if math::abs(gamma) <= eps * math::sqrt(alpha * beta) {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + math::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_pair(cols, i, j, c, s);
                rotate_pair(v, i, j, c, s);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    debug_assert!(i < j);
    let (left, right) = cols.split_at_mut(j);
    for (a, b) in left[i].iter_mut().zip(right[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Flip each component row so its largest-magnitude loading (ties toward the
/// lowest feature index) is positive.
fn apply_sign_convention(components: &mut Matrix) {
    let p = components.rows();
    for i in 0..p {
        let mut best_f = 0;
        let mut best_abs = math::abs(components.get(i, 0));
        for f in 1..p {
            let a = math::abs(components.get(i, f));
            if a > best_abs {
                best_abs = a;
                best_f = f;
            }
        }
        if components.get(i, best_f) < 0.0 {
            for f in 0..p {
                components.set(i, f, -components.get(i, f));
            }
        }
    }
}
