//! Preprocessing transforms: label encoding, standardization, quantile
//! outlier trimming, k-NN imputation and pairwise correlation.
//!
//! Each transform is a pure function from a [`Table`](crate::table::Table)
//! to a new table plus the fitted parameters, so a run can be persisted and
//! replayed on held-out data.

mod correlate;
mod encode;
mod impute;
mod scale;
mod trim;

pub use correlate::correlation_matrix;
pub use encode::{apply_encoding, decode_labels, encode_labels, EncodingMap};
pub use impute::{knn_impute, ImputeConfig};
pub use scale::{apply_standardization, standardize, Standardization};
pub use trim::{trim_outliers, winsorize, TrimBounds};
