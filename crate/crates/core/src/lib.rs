//! Core algorithms for a tabular unsupervised-learning toolkit.
//!
//! Everything here is pure computation over owned data: a column-oriented
//! [`table::Table`], moment statistics, preprocessing transforms (label
//! encoding, standardization, quantile trimming, k-NN imputation,
//! correlation), PCA via an in-repo Jacobi SVD, k-means with elbow
//! selection, cluster interpretation, regression metrics, a planted-cluster
//! synthetic generator, and deterministic SVG chart rendering.
//!
//! The crate is `no_std` compatible (`alloc` required); file formats, CSV
//! ingestion and the command-line driver live in the companion CLI crate.
//! All randomness flows through the in-repo [`rng::SplitMix64`] generator
//! and all transcendental math through `libm`, so identical inputs produce
//! bit-identical outputs on every platform.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod chart;
pub mod cluster;
pub mod error;
pub mod interpret;
pub mod math;
pub mod matrix;
pub mod metrics;
pub mod pca;
pub mod preprocess;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use table::{Column, ColumnKind, Role, Table};
