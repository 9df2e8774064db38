//! The run manifest: a human-readable record of a run's configuration,
//! fitted artifacts and output hashes.
//!
//! The `[config]` section reuses the config-file syntax, so the manifest
//! itself can be passed back through `--config` to reproduce the run.
//! Model parameters are written with 17 significant digits, enough to
//! round-trip any f64 exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use tabkit_core::pca::PcaModel;
use tabkit_core::preprocess::{EncodingMap, Standardization, TrimBounds};

use crate::config::RunConfig;
use crate::CliError;

/// Full f64 precision (17 significant digits).
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct ManifestBuilder {
    text: String,
}

impl Default for ManifestBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ManifestBuilder {
    pub fn new() -> Self {
        ManifestBuilder {
            text: String::from("# tabkit run manifest\n"),
        }
    }

    pub fn config(&mut self, config: &RunConfig) -> &mut Self {
        self.section("config");
        for (key, value) in config.entries() {
            writeln!(self.text, "{key} = {value}").unwrap();
        }
        self
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        writeln!(self.text, "\n[{name}]").unwrap();
        self
    }

    pub fn line(&mut self, line: &str) -> &mut Self {
        writeln!(self.text, "{line}").unwrap();
        self
    }

    pub fn encodings(&mut self, maps: &[EncodingMap]) -> &mut Self {
        self.section("encodings");
        for map in maps {
            let codes: Vec<String> = map
                .categories()
                .iter()
                .enumerate()
                .map(|(code, cat)| format!("{code}:{cat}"))
                .collect();
            writeln!(self.text, "{}: {}", map.column, codes.join(" | ")).unwrap();
        }
        self
    }

    pub fn standardizations(&mut self, params: &[Standardization]) -> &mut Self {
        self.section("standardization");
        for p in params {
            writeln!(
                self.text,
                "{}: mean={} std={}",
                p.column,
                f17(p.mean),
                f17(p.std_sample)
            )
            .unwrap();
        }
        self
    }

    pub fn trim_bounds(&mut self, bounds: &[TrimBounds]) -> &mut Self {
        self.section("trim_bounds");
        for b in bounds {
            writeln!(
                self.text,
                "{}: lower={} upper={} fraction={}",
                b.column,
                f17(b.lower),
                f17(b.upper),
                f17(b.fraction)
            )
            .unwrap();
        }
        self
    }

    pub fn pca(&mut self, model: &PcaModel) -> &mut Self {
        self.section("pca");
        writeln!(self.text, "features = {}", model.feature_names.join(",")).unwrap();
        writeln!(self.text, "center = {}", join_f17(&model.center)).unwrap();
        writeln!(
            self.text,
            "explained_variance = {}",
            join_f17(&model.explained_variance)
        )
        .unwrap();
        writeln!(
            self.text,
            "explained_variance_ratio = {}",
            join_f17(&model.explained_variance_ratio)
        )
        .unwrap();
        for i in 0..model.components.rows() {
            writeln!(
                self.text,
                "component_{i} = {}",
                join_f17(model.components.row(i))
            )
            .unwrap();
        }
        self
    }

    pub fn kmeans(&mut self, model: &tabkit_core::cluster::KMeansModel) -> &mut Self {
        self.section("kmeans");
        writeln!(self.text, "k = {}", model.k).unwrap();
        writeln!(self.text, "seed = {}", model.seed).unwrap();
        writeln!(self.text, "restarts = {}", model.restarts).unwrap();
        writeln!(self.text, "iterations = {}", model.iterations_run).unwrap();
        writeln!(self.text, "inertia = {}", f17(model.inertia)).unwrap();
        for c in 0..model.centroids.rows() {
            writeln!(
                self.text,
                "centroid_{c} = {}",
                join_f17(model.centroids.row(c))
            )
            .unwrap();
        }
        self
    }

    /// Hash the named files (paths relative to `base`) into an artifact list.
    pub fn artifacts(&mut self, base: &Path, files: &[String]) -> Result<&mut Self, CliError> {
        self.section("artifacts");
        for file in files {
            let digest = sha256_file(&base.join(file))?;
            writeln!(self.text, "sha256 {digest}  {file}").unwrap();
        }
        Ok(self)
    }

    pub fn finish(&self) -> String {
        self.text.clone()
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.text.as_bytes())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

fn join_f17(values: &[f64]) -> String {
    values.iter().map(|v| f17(*v)).collect::<Vec<_>>().join(",")
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Parse the artifact sections back from a manifest written by this module;
/// used to reuse fitted transforms on held-out data.
pub struct FittedArtifacts {
    pub encodings: Vec<EncodingMap>,
    pub standardizations: Vec<Standardization>,
    pub trim_bounds: Vec<TrimBounds>,
}

pub fn parse_artifacts(text: &str) -> Result<FittedArtifacts, CliError> {
    let mut encodings = Vec::new();
    let mut standardizations = Vec::new();
    let mut trim_bounds = Vec::new();
    let mut section = String::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].to_string();
            continue;
        }
        match section.as_str() {
            "encodings" => {
                let (column, rest) = line.split_once(':').ok_or_else(|| bad_manifest(line))?;
                let mut categories = Vec::new();
                for (i, part) in rest.split('|').enumerate() {
                    let (code, cat) = part
                        .trim()
                        .split_once(':')
                        .ok_or_else(|| bad_manifest(line))?;
                    let code: usize = code.trim().parse().map_err(|_| bad_manifest(line))?;
                    if code != i {
                        return Err(bad_manifest(line));
                    }
                    categories.push(cat.to_string());
                }
                encodings.push(
                    EncodingMap::from_categories(column.trim(), categories)
                        .map_err(CliError::from)?,
                );
            }
            "standardization" => {
                let (column, rest) = line.split_once(':').ok_or_else(|| bad_manifest(line))?;
                let mean = field_value(rest, "mean").ok_or_else(|| bad_manifest(line))?;
                let std = field_value(rest, "std").ok_or_else(|| bad_manifest(line))?;
                standardizations.push(Standardization {
                    column: column.trim().to_string(),
                    mean,
                    std_sample: std,
                });
            }
            "trim_bounds" => {
                let (column, rest) = line.split_once(':').ok_or_else(|| bad_manifest(line))?;
                let lower = field_value(rest, "lower").ok_or_else(|| bad_manifest(line))?;
                let upper = field_value(rest, "upper").ok_or_else(|| bad_manifest(line))?;
                let fraction = field_value(rest, "fraction").ok_or_else(|| bad_manifest(line))?;
                trim_bounds.push(TrimBounds {
                    column: column.trim().to_string(),
                    lower,
                    upper,
                    fraction,
                });
            }
            _ => {}
        }
    }
    Ok(FittedArtifacts {
        encodings,
        standardizations,
        trim_bounds,
    })
}

fn field_value(rest: &str, key: &str) -> Option<f64> {
    rest.split_whitespace()
        .find_map(|tok| tok.strip_prefix(&format!("{key}=")))
        .and_then(|v| v.parse().ok())
}

fn bad_manifest(line: &str) -> CliError {
    CliError::Data(format!("malformed manifest line `{line}`"))
}
