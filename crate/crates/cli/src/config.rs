//! Pipeline run configuration.
//!
//! Every knob exists both as a command-line flag and as a `key = value`
//! entry in a flat config file; flags win. The emitted run manifest embeds
//! the fully resolved configuration in the same format, so a manifest can be
//! fed back through `--config` to reproduce a run.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Preprocessing stages whose order is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Encode,
    Impute,
    Trim,
    Standardize,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Encode => "encode",
            Stage::Impute => "impute",
            Stage::Trim => "trim",
            Stage::Standardize => "standardize",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "encode" => Ok(Stage::Encode),
            "impute" => Ok(Stage::Impute),
            "trim" => Ok(Stage::Trim),
            "standardize" => Ok(Stage::Standardize),
            other => Err(CliError::Config(format!("unknown stage `{other}`"))),
        }
    }
}

/// Cluster-count choice: automatic elbow selection or a forced value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => write!(f, "auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl KChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        let k: usize = s.parse().map_err(|_| {
            CliError::Config(format!("k must be `auto` or a positive integer, got `{s}`"))
        })?;
        if k == 0 {
            return Err(CliError::Config("k must be positive".to_string()));
        }
        Ok(KChoice::Fixed(k))
    }
}

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub schema: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub impute_k: usize,
    pub trim_fraction: f64,
    pub k: KChoice,
    pub k_max: usize,
    pub variance_threshold: f64,
    pub summary_m: usize,
    pub nearest_m: usize,
    pub stage_order: Vec<Stage>,
    pub dependent: Option<String>,
    pub winsorize: bool,
    pub pca_raw: bool,
    pub cluster_full_space: bool,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            schema: None,
            out: PathBuf::from("run"),
            seed: 42,
            impute_k: 5,
            trim_fraction: 0.10,
            k: KChoice::Auto,
            k_max: 10,
            variance_threshold: 0.95,
            summary_m: 7,
            nearest_m: 10,
            stage_order: vec![
                Stage::Encode,
                Stage::Impute,
                Stage::Trim,
                Stage::Standardize,
            ],
            dependent: None,
            winsorize: false,
            pca_raw: false,
            cluster_full_space: false,
            restarts: 10,
            max_iter: 300,
            tol: 1e-4,
            bins: 30,
        }
    }
}

impl RunConfig {
    /// Reject out-of-domain values before any stage runs.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.input.as_os_str().is_empty() {
            return Err(CliError::Config("no input file given".to_string()));
        }
        if !(self.trim_fraction > 0.0 && self.trim_fraction < 0.5) {
            return Err(CliError::Config(format!(
                "trim fraction {} outside (0, 0.5)",
                self.trim_fraction
            )));
        }
        if !(self.variance_threshold > 0.0 && self.variance_threshold <= 1.0) {
            return Err(CliError::Config(format!(
                "variance threshold {} outside (0, 1]",
                self.variance_threshold
            )));
        }
        if self.impute_k == 0 {
            return Err(CliError::Config("impute k must be positive".to_string()));
        }
        if self.summary_m == 0 || self.nearest_m == 0 {
            return Err(CliError::Config(
                "summary and nearest counts must be positive".to_string(),
            ));
        }
        if self.k_max < 2 {
            return Err(CliError::Config("k_max must be at least 2".to_string()));
        }
        let all = [
            Stage::Encode,
            Stage::Impute,
            Stage::Trim,
            Stage::Standardize,
        ];
        let complete = self.stage_order.len() == 4
            && all
                .iter()
                .all(|s| self.stage_order.iter().filter(|x| *x == s).count() == 1);
        if !complete {
            return Err(CliError::Config(
                "stage order must list encode, impute, trim, standardize exactly once each"
                    .to_string(),
            ));
        }
        Ok(())
    }

    pub fn stage_order_string(&self) -> String {
        self.stage_order
            .iter()
            .map(Stage::as_str)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_stage_order(s: &str) -> Result<Vec<Stage>, CliError> {
        let stages: Vec<Stage> = s.split(',').map(Stage::parse).collect::<Result<_, _>>()?;
        Ok(stages)
    }

    /// Resolved key-value view, in stable order; the manifest embeds this.
    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("input".into(), self.input.display().to_string()),
            (
                "schema".into(),
                self.schema
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            ),
            ("out".into(), self.out.display().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("impute_k".into(), self.impute_k.to_string()),
            ("trim_fraction".into(), format!("{}", self.trim_fraction)),
            ("k".into(), self.k.to_string()),
            ("k_max".into(), self.k_max.to_string()),
            (
                "variance_threshold".into(),
                format!("{}", self.variance_threshold),
            ),
            ("summary_m".into(), self.summary_m.to_string()),
            ("nearest_m".into(), self.nearest_m.to_string()),
            ("stage_order".into(), self.stage_order_string()),
            (
                "dependent".into(),
                self.dependent.clone().unwrap_or_default(),
            ),
            ("winsorize".into(), self.winsorize.to_string()),
            ("pca_raw".into(), self.pca_raw.to_string()),
            (
                "cluster_full_space".into(),
                self.cluster_full_space.to_string(),
            ),
            ("restarts".into(), self.restarts.to_string()),
            ("max_iter".into(), self.max_iter.to_string()),
            ("tol".into(), format!("{}", self.tol)),
            ("bins".into(), self.bins.to_string()),
        ]
    }

    /// Apply `key = value` pairs from a config file.
    pub fn apply_entry(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad_num = |k: &str, v: &str| CliError::Config(format!("bad value `{v}` for {k}"));
        match key {
            "input" => self.input = PathBuf::from(value),
            "schema" => {
                self.schema = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = value.parse().map_err(|_| bad_num(key, value))?,
            "impute_k" => self.impute_k = value.parse().map_err(|_| bad_num(key, value))?,
            "trim_fraction" => {
                self.trim_fraction = value.parse().map_err(|_| bad_num(key, value))?
            }
            "k" => self.k = KChoice::parse(value)?,
            "k_max" => self.k_max = value.parse().map_err(|_| bad_num(key, value))?,
            "variance_threshold" => {
                self.variance_threshold = value.parse().map_err(|_| bad_num(key, value))?
            }
            "summary_m" => self.summary_m = value.parse().map_err(|_| bad_num(key, value))?,
            "nearest_m" => self.nearest_m = value.parse().map_err(|_| bad_num(key, value))?,
            "stage_order" => self.stage_order = Self::parse_stage_order(value)?,
            "dependent" => {
                self.dependent = if value.is_empty() {
                    None
                } else {
                    Some(value.to_string())
                }
            }
            "winsorize" => self.winsorize = parse_bool(key, value)?,
            "pca_raw" => self.pca_raw = parse_bool(key, value)?,
            "cluster_full_space" => self.cluster_full_space = parse_bool(key, value)?,
            "restarts" => self.restarts = value.parse().map_err(|_| bad_num(key, value))?,
            "max_iter" => self.max_iter = value.parse().map_err(|_| bad_num(key, value))?,
            "tol" => self.tol = value.parse().map_err(|_| bad_num(key, value))?,
            "bins" => self.bins = value.parse().map_err(|_| bad_num(key, value))?,
            other => {
                return Err(CliError::Config(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(CliError::Config(format!(
            "bad value `{other}` for {key}, expected true or false"
        ))),
    }
}

/// Read a flat config file (or the `[config]` section of a run manifest).
///
/// Lines are `key = value`; `#` starts a comment. Section headers switch
/// context: only keys inside `[config]` (or before any header) are read.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut entries = BTreeMap::new();
    let mut in_config = true;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            in_config = line == "[config]";
            continue;
        }
        if !in_config {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}: malformed config line `{line}`",
                path.display()
            )));
        };
        entries.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(entries)
}
