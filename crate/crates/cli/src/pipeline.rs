//! End-to-end pipeline: ingest, preprocess, correlate, PCA, cluster,
//! summarize, report.
//!
//! The driver executes the four preprocessing stages in the configured
//! order, snapshots every intermediate table as CSV, and finishes with a
//! run manifest that records the resolved configuration, all fitted
//! artifacts and the output hashes. The same function backs the `pipeline`
//! subcommand and the per-stage subcommands reuse its pieces.

use std::fs;
use std::path::Path;

use log::warn;
use tabkit_core::cluster::{elbow_sweep, kmeans_fit, ElbowCurve, KMeansModel, KMeansOptions};
use tabkit_core::interpret::{improvement_percent, summarize_clusters, ClusterSummary};
use tabkit_core::matrix::Matrix;
use tabkit_core::pca::{components_for_threshold, fit_pca, project, PcaModel};
use tabkit_core::preprocess::{
    correlation_matrix, decode_labels, encode_labels, knn_impute, standardize, trim_outliers,
    winsorize, EncodingMap, ImputeConfig, Standardization, TrimBounds,
};
use tabkit_core::stats::{column_stats, ColumnStats};
use tabkit_core::table::{Column, ColumnKind, Role, Table};
use tabkit_core::Error;

use crate::config::{KChoice, RunConfig, Stage};
use crate::manifest::ManifestBuilder;
use crate::{io, report, CliError};

/// Everything a finished run produced, for callers that want the values
/// rather than the files.
pub struct RunReport {
    pub config: RunConfig,
    pub initial_rows: usize,
    pub record_counts: Vec<(String, usize)>,
    pub stats_raw: Vec<ColumnStats>,
    pub encodings: Vec<EncodingMap>,
    pub standardizations: Vec<Standardization>,
    pub trim_bounds: Vec<TrimBounds>,
    pub dropped_features: Vec<(String, String)>,
    pub pca: PcaModel,
    pub q_components: usize,
    pub elbow: Option<ElbowCurve>,
    pub kmeans: KMeansModel,
    pub summaries: Vec<ClusterSummary>,
    pub improvement: Option<Improvement>,
    /// Post-trim table in original units with decoded categories, aligned
    /// row-for-row with `scores` and the model assignments.
    pub presentation: Table,
    pub scores: Matrix,
    pub row_ids: Vec<String>,
    pub warnings: Vec<String>,
    pub stage_log: Vec<String>,
}

/// Cross-cluster comparison of the dependent column.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub dependent: String,
    pub best_cluster: usize,
    pub best_mean: f64,
    pub worst_cluster: usize,
    pub worst_mean: f64,
    /// `100 * best / worst`.
    pub ratio_percent: f64,
    /// `ratio_percent - 100`.
    pub increase_percent: f64,
}

/// Run the full pipeline, writing all artifacts under `config.out`.
///
/// On error a `FAILED` marker naming the stage is left in the output
/// directory next to whatever partial artifacts were already written.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", config.out.display())))?;
    let failed_marker = config.out.join("FAILED");
    let _ = fs::remove_file(&failed_marker);

    match run_stages(config) {
        Ok(report) => Ok(report),
        Err((stage, err)) => {
            let _ = fs::write(&failed_marker, format!("stage {stage} failed: {err}\n"));
            Err(match err {
                CliError::Config(m) => CliError::Config(format!("stage {stage}: {m}")),
                CliError::Data(m) => CliError::Data(format!("stage {stage}: {m}")),
                CliError::Numeric(m) => CliError::Numeric(format!("stage {stage}: {m}")),
            })
        }
    }
}

type StageResult<T> = Result<T, (&'static str, CliError)>;

fn at(stage: &'static str) -> impl Fn(CliError) -> (&'static str, CliError) {
    move |e| (stage, e)
}

fn run_stages(config: &RunConfig) -> StageResult<RunReport> {
    let out = &config.out;
    let mut log: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    // -- ingest ------------------------------------------------------------
    let raw =
        io::load_with_sidecar(&config.input, config.schema.as_deref()).map_err(at("ingest"))?;
    let table = raw.clone();
    let initial_rows = table.row_count();
    io::write_csv(&table, &out.join("01_ingested.csv")).map_err(at("ingest"))?;
    io::write_schema(&table, &out.join("01_ingested.schema.csv")).map_err(at("ingest"))?;
    let record_counts: Vec<(String, usize)> = table
        .columns()
        .iter()
        .filter(|c| c.role() == Role::Dependent)
        .map(|c| (c.name().to_string(), c.present_count()))
        .collect();
    log.push(format!(
        "ingest: {} rows, {} columns",
        initial_rows,
        table.columns().len()
    ));
    for (name, count) in &record_counts {
        log.push(format!("ingest: target {name} has {count} records"));
    }

    // the originally numeric independents; trimming applies to these only,
    // never to encoded categorical codes
    let trim_columns: Vec<String> =
        table.names_where(|c| c.kind() == ColumnKind::Numeric && c.role() == Role::Independent);
    let categorical_columns: Vec<String> =
        table.names_where(|c| c.kind() == ColumnKind::Categorical);

    // -- raw moment statistics ----------------------------------------------
    let mut stats_raw = Vec::new();
    for col in table.columns() {
        if col.kind() != ColumnKind::Numeric {
            continue;
        }
        match column_stats(&table, col.name()) {
            Ok(s) => stats_raw.push(s),
            Err(e) => {
                let note = format!("stats: skipped {}: {e}", col.name());
                warn!("{note}");
                warnings.push(note);
            }
        }
    }
    io::write_stats_csv(&stats_raw, &out.join("02_stats_raw.csv")).map_err(at("stats"))?;
    log.push(format!(
        "stats: {} numeric columns profiled",
        stats_raw.len()
    ));

    // -- configurable preprocessing stages ----------------------------------
    let mut work = table;
    let mut encodings: Vec<EncodingMap> = Vec::new();
    let mut standardizations: Vec<Standardization> = Vec::new();
    let mut trim_bounds: Vec<TrimBounds> = Vec::new();
    let mut dropped_features: Vec<(String, String)> = Vec::new();

    for (idx, stage) in config.stage_order.iter().enumerate() {
        let file_idx = idx + 3;
        match stage {
            Stage::Encode => {
                let names: Vec<&str> = categorical_columns.iter().map(String::as_str).collect();
                let (encoded, maps) =
                    encode_labels(&work, &names).map_err(|e| at("encode")(CliError::from(e)))?;
                work = encoded;
                log.push(format!("encode: {} categorical columns coded", maps.len()));
                encodings = maps;
                io::write_csv(&work, &out.join(format!("{file_idx:02}_encoded.csv")))
                    .map_err(at("encode"))?;
            }
            Stage::Impute => {
                let impute_config = ImputeConfig::new(config.impute_k)
                    .with_mode_columns(encodings.iter().map(|m| m.column.clone()).collect());
                work = knn_impute(&work, &impute_config)
                    .map_err(|e| at("impute")(CliError::from(e)))?;
                log.push(format!("impute: k = {} neighbour fill", config.impute_k));
                io::write_csv(&work, &out.join(format!("{file_idx:02}_imputed.csv")))
                    .map_err(at("impute"))?;
            }
            Stage::Trim => {
                let names: Vec<&str> = trim_columns
                    .iter()
                    .map(String::as_str)
                    .filter(|n| work.column_index(n).is_some())
                    .collect();
                let before = work.row_count();
                let (next, bounds) = if config.winsorize {
                    winsorize(&work, &names, config.trim_fraction)
                        .map_err(|e| at("trim")(CliError::from(e)))?
                } else {
                    trim_outliers(&work, &names, config.trim_fraction)
                        .map_err(|e| at("trim")(CliError::from(e)))?
                };
                work = next;
                log.push(format!(
                    "trim: fraction {} over {:?}, {} -> {} rows{}",
                    config.trim_fraction,
                    names,
                    before,
                    work.row_count(),
                    if config.winsorize {
                        " (winsorized)"
                    } else {
                        ""
                    },
                ));
                trim_bounds = bounds;
                io::write_csv(&work, &out.join(format!("{file_idx:02}_trimmed.csv")))
                    .map_err(at("trim"))?;
            }
            Stage::Standardize => {
                // candidate features: numeric independents at this point;
                // constant columns are dropped with a warning
                let mut keep: Vec<String> = Vec::new();
                for name in work.names_where(|c| {
                    c.kind() == ColumnKind::Numeric && c.role() == Role::Independent
                }) {
                    let col = work
                        .column(&name)
                        .map_err(|e| at("standardize")(e.into()))?;
                    let present = col
                        .present_numeric()
                        .map_err(|e| at("standardize")(CliError::from(e)))?;
                    let distinct = {
                        let mut v = present.clone();
                        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                        v.dedup();
                        v.len()
                    };
                    if present.len() < 2 || distinct < 2 {
                        let note = format!("standardize: dropped constant column {name}");
                        warn!("{note}");
                        warnings.push(note.clone());
                        dropped_features.push((name, "constant".to_string()));
                    } else {
                        keep.push(name);
                    }
                }
                let names: Vec<&str> = keep.iter().map(String::as_str).collect();
                let (scaled, params) =
                    standardize(&work, &names).map_err(|e| at("standardize")(CliError::from(e)))?;
                work = scaled;
                log.push(format!("standardize: {} feature columns", params.len()));
                standardizations = params;
                io::write_csv(&work, &out.join(format!("{file_idx:02}_standardized.csv")))
                    .map_err(at("standardize"))?;
            }
        }
    }

    // presentation view: undo standardization, decode categories
    let presentation =
        presentation_table(&work, &standardizations, &encodings).map_err(at("presentation"))?;
    io::write_csv(&presentation, &out.join("07_presentation.csv")).map_err(at("presentation"))?;
    io::write_schema(&presentation, &out.join("07_presentation.schema.csv"))
        .map_err(at("presentation"))?;
    let row_ids = io::row_ids(&presentation);

    // -- correlation ---------------------------------------------------------
    let feature_names: Vec<String> = standardizations.iter().map(|s| s.column.clone()).collect();
    let mut corr_columns = feature_names.clone();
    for col in work.columns() {
        if col.role() == Role::Dependent && col.kind() == ColumnKind::Numeric {
            let distinct_ok = col
                .present_numeric()
                .map(|mut v| {
                    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                    v.dedup();
                    v.len() >= 2
                })
                .unwrap_or(false);
            if distinct_ok {
                corr_columns.push(col.name().to_string());
            }
        }
    }
    let corr_refs: Vec<&str> = corr_columns.iter().map(String::as_str).collect();
    let correlation =
        correlation_matrix(&work, &corr_refs).map_err(|e| at("correlate")(CliError::from(e)))?;
    io::write_labeled_matrix_csv(&corr_columns, &correlation, &out.join("08_correlation.csv"))
        .map_err(at("correlate"))?;
    log.push(format!(
        "correlate: {}x{} matrix over {:?}",
        corr_columns.len(),
        corr_columns.len(),
        corr_columns
    ));

    // -- PCA ------------------------------------------------------------------
    let feature_refs: Vec<&str> = feature_names.iter().map(String::as_str).collect();
    let pca_input = if config.pca_raw { &presentation } else { &work };
    let pca = fit_pca(pca_input, &feature_refs).map_err(|e| at("pca")(CliError::from(e)))?;
    let q_components = components_for_threshold(&pca, config.variance_threshold);
    let score_names: Vec<String> = (1..=pca.n_features()).map(|i| format!("pc{i}")).collect();
    let full_scores =
        project(&pca, pca_input, pca.n_features()).map_err(|e| at("pca")(CliError::from(e)))?;
    io::write_matrix_csv(
        &row_ids,
        &full_scores,
        &score_names,
        &out.join("09_scores.csv"),
    )
    .map_err(at("pca"))?;
    write_variance_csv(&pca, &out.join("09_variance_ratio.csv")).map_err(at("pca"))?;
    log.push(format!(
        "pca: {} features, {} components reach threshold {}{}",
        pca.n_features(),
        q_components,
        config.variance_threshold,
        if config.pca_raw {
            " (raw covariance)"
        } else {
            ""
        },
    ));

    // -- clustering -------------------------------------------------------------
    let cluster_matrix = if config.cluster_full_space {
        feature_matrix(&work, &feature_refs).map_err(at("cluster"))?
    } else {
        slice_columns(&full_scores, q_components)
    };
    let opts = KMeansOptions {
        restarts: config.restarts,
        max_iter: config.max_iter,
        tol: config.tol,
        ..KMeansOptions::default()
    };
    let (elbow, kmeans) = match config.k {
        KChoice::Fixed(k) => {
            log.push(format!("cluster: elbow sweep skipped, k forced to {k}"));
            let model = kmeans_fit(&cluster_matrix, k, config.seed, &opts)
                .map_err(|e| at("cluster")(CliError::from(e)))?;
            (None, model)
        }
        KChoice::Auto => {
            let k_max = config.k_max.min(cluster_matrix.rows().saturating_sub(1));
            if k_max < 2 {
                return Err(at("cluster")(CliError::from(Error::Cardinality(
                    "too few rows for an elbow sweep".to_string(),
                ))));
            }
            let curve = elbow_sweep(&cluster_matrix, 1, k_max, config.seed, &opts)
                .map_err(|e| at("cluster")(CliError::from(e)))?;
            io::write_elbow_csv(&curve.ks, &curve.inertias, &out.join("10_elbow.csv"))
                .map_err(at("cluster"))?;
            log.push(format!(
                "cluster: elbow sweep k = 1..{k_max} chose k = {}",
                curve.chosen_k
            ));
            let model = kmeans_fit(&cluster_matrix, curve.chosen_k, config.seed, &opts)
                .map_err(|e| at("cluster")(CliError::from(e)))?;
            (Some(curve), model)
        }
    };
    io::write_assignments_csv(
        &row_ids,
        &kmeans.assignments,
        &out.join("10_assignments.csv"),
    )
    .map_err(at("cluster"))?;
    let centroid_names: Vec<String> = (1..=cluster_matrix.cols())
        .map(|i| format!("pc{i}"))
        .collect();
    let centroid_ids: Vec<String> = (0..kmeans.k).map(|c| c.to_string()).collect();
    io::write_matrix_csv(
        &centroid_ids,
        &kmeans.centroids,
        &centroid_names,
        &out.join("10_centroids.csv"),
    )
    .map_err(at("cluster"))?;
    log.push(format!(
        "cluster: k = {}, inertia {:.6}, {} iterations, space = {}",
        kmeans.k,
        kmeans.inertia,
        kmeans.iterations_run,
        if config.cluster_full_space {
            "full features".to_string()
        } else {
            format!("top {q_components} components")
        },
    ));

    // -- interpretation -----------------------------------------------------------
    let summaries = summarize_clusters(&presentation, &kmeans, &cluster_matrix, config.summary_m)
        .map_err(|e| at("summarize")(CliError::from(e)))?;
    for s in &summaries {
        if s.m_used < config.summary_m {
            let note = format!(
                "summarize: cluster {} holds only {} rows, summarized all of them",
                s.cluster, s.population
            );
            warn!("{note}");
            warnings.push(note);
        }
    }
    write_summary_csv(&summaries, &presentation, &out.join("11_summary.csv"))
        .map_err(at("summarize"))?;

    let dependent = resolve_dependent(config, &presentation);
    let improvement = match &dependent {
        None => {
            let note = "summarize: no numeric dependent column, comparison skipped".to_string();
            warn!("{note}");
            warnings.push(note);
            None
        }
        Some(name) => match improvement_report(name, &summaries) {
            Ok(imp) => {
                log.push(format!(
                    "summarize: {} cluster {} vs cluster {} = {:.1}% (ratio), {:+.1}% (increase)",
                    name,
                    imp.best_cluster,
                    imp.worst_cluster,
                    imp.ratio_percent,
                    imp.increase_percent
                ));
                Some(imp)
            }
            Err(e) => {
                let note = format!("summarize: comparison skipped: {e}");
                warn!("{note}");
                warnings.push(note);
                None
            }
        },
    };
    if let Some(imp) = &improvement {
        let text = format!(
            "dependent = {}\nbest_cluster = {}\nbest_mean = {}\nworst_cluster = {}\nworst_mean = {}\nratio_percent = {:.2}\nincrease_percent = {:.2}\n",
            imp.dependent,
            imp.best_cluster,
            imp.best_mean,
            imp.worst_cluster,
            imp.worst_mean,
            imp.ratio_percent,
            imp.increase_percent
        );
        fs::write(out.join("11_improvement.txt"), text)
            .map_err(|e| at("summarize")(CliError::Data(e.to_string())))?;
    }

    // -- report ----------------------------------------------------------------
    let scores_for_report =
        slice_columns(&full_scores, q_components.max(2).min(full_scores.cols()));
    let report_input = report::ReportInput {
        raw: &raw,
        presentation: &presentation,
        trim_columns: &trim_columns,
        correlation_labels: &corr_columns,
        correlation: &correlation,
        pca: &pca,
        scores: &scores_for_report,
        elbow: elbow.as_ref(),
        kmeans: &kmeans,
        cluster_points: &cluster_matrix,
        nearest_m: config.nearest_m,
        bins: config.bins,
    };
    let figures = report::emit_report(&report_input, &out.join("report")).map_err(at("report"))?;
    log.push(format!("report: {} files emitted", figures.len()));

    // -- manifest ----------------------------------------------------------------
    let mut artifact_files: Vec<String> = Vec::new();
    for entry in fs::read_dir(out).map_err(|e| at("manifest")(CliError::Data(e.to_string())))? {
        let entry = entry.map_err(|e| at("manifest")(CliError::Data(e.to_string())))?;
        if entry.path().is_file() {
            let name = entry.file_name().to_string_lossy().to_string();
            if name != "run_manifest.txt" && name != "FAILED" {
                artifact_files.push(name);
            }
        }
    }
    for fig in &figures {
        artifact_files.push(format!("report/{fig}"));
    }
    artifact_files.sort();

    let mut builder = ManifestBuilder::new();
    builder.config(config);
    builder.section("stages");
    for line in &log {
        builder.line(line);
    }
    builder.section("warnings");
    for line in &warnings {
        builder.line(line);
    }
    builder
        .encodings(&encodings)
        .standardizations(&standardizations)
        .trim_bounds(&trim_bounds)
        .pca(&pca)
        .kmeans(&kmeans);
    builder
        .artifacts(out, &artifact_files)
        .map_err(at("manifest"))?;
    builder
        .write(&out.join("run_manifest.txt"))
        .map_err(at("manifest"))?;

    Ok(RunReport {
        config: config.clone(),
        initial_rows,
        record_counts,
        stats_raw,
        encodings,
        standardizations,
        trim_bounds,
        dropped_features,
        pca,
        q_components,
        elbow,
        kmeans,
        summaries,
        improvement,
        presentation,
        scores: full_scores,
        row_ids,
        warnings,
        stage_log: log,
    })
}

/// Undo standardization and decode labels so values read in original units.
fn presentation_table(
    work: &Table,
    standardizations: &[Standardization],
    encodings: &[EncodingMap],
) -> Result<Table, CliError> {
    let mut out = work.clone();
    for p in standardizations {
        let col = out.column(&p.column)?;
        let cells: Vec<Option<f64>> = col
            .numeric_values()?
            .iter()
            .map(|c| c.map(|x| x * p.std_sample + p.mean))
            .collect();
        let role = col.role();
        out = out.with_column_replaced(&p.column, Column::numeric(&p.column, role, cells)?)?;
    }
    // encoded codes may be slightly off integer after the round trip
    let mut rounded = out.clone();
    for map in encodings {
        let col = rounded.column(&map.column)?;
        if col.kind() == ColumnKind::Numeric {
            let cells: Vec<Option<f64>> = col
                .numeric_values()?
                .iter()
                .map(|c| c.map(|x| x.round()))
                .collect();
            let role = col.role();
            rounded = rounded
                .with_column_replaced(&map.column, Column::numeric(&map.column, role, cells)?)?;
        }
    }
    decode_labels(&rounded, encodings).map_err(CliError::from)
}

fn feature_matrix(table: &Table, columns: &[&str]) -> Result<Matrix, CliError> {
    let n = table.row_count();
    let mut data = Vec::with_capacity(n * columns.len());
    for i in 0..n {
        for &name in columns {
            let col = table.column(name)?;
            match col.numeric_values()?[i] {
                Some(v) => data.push(v),
                None => {
                    return Err(CliError::from(Error::InsufficientData(format!(
                        "column {name} still has missing cells at clustering time"
                    ))))
                }
            }
        }
    }
    Matrix::from_vec(n, columns.len(), data).map_err(CliError::from)
}

fn slice_columns(m: &Matrix, q: usize) -> Matrix {
    let q = q.min(m.cols()).max(1);
    let mut out = Matrix::zeros(m.rows(), q);
    for i in 0..m.rows() {
        for j in 0..q {
            out.set(i, j, m.get(i, j));
        }
    }
    out
}

fn write_variance_csv(pca: &PcaModel, path: &Path) -> Result<(), CliError> {
    let ids: Vec<String> = (1..=pca.n_features()).map(|i| format!("pc{i}")).collect();
    let mut m = Matrix::zeros(pca.n_features(), 3);
    let mut cum = 0.0;
    for i in 0..pca.n_features() {
        cum += pca.explained_variance_ratio[i];
        m.set(i, 0, pca.explained_variance[i]);
        m.set(i, 1, pca.explained_variance_ratio[i]);
        m.set(i, 2, cum);
    }
    io::write_matrix_csv(
        &ids,
        &m,
        &[
            "eigenvalue".to_string(),
            "variance_ratio".to_string(),
            "cumulative_ratio".to_string(),
        ],
        path,
    )
}

/// Table-4-shaped export: one row per variable with a kind marker, one
/// column per cluster.
pub fn write_summary_csv(
    summaries: &[ClusterSummary],
    presentation: &Table,
    path: &Path,
) -> Result<(), CliError> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut header = vec!["variable".to_string(), "kind".to_string()];
    for s in summaries {
        header.push(format!("cluster_{}", s.cluster));
    }
    writer
        .write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;

    for col in presentation.columns() {
        if col.kind() == ColumnKind::Identifier {
            continue;
        }
        let kind = match col.kind() {
            ColumnKind::Categorical => "(c)",
            _ => "(n)",
        };
        let mut record = vec![col.name().to_string(), kind.to_string()];
        for s in summaries {
            let cell = match col.kind() {
                ColumnKind::Categorical => s
                    .categorical_modes
                    .get(col.name())
                    .cloned()
                    .unwrap_or_default(),
                _ => s
                    .numeric_means
                    .get(col.name())
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_default(),
            };
            record.push(cell);
        }
        writer
            .write_record(&record)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(())
}

/// The configured dependent column, or the first numeric dependent.
fn resolve_dependent(config: &RunConfig, table: &Table) -> Option<String> {
    if let Some(name) = &config.dependent {
        return Some(name.clone());
    }
    table
        .columns()
        .iter()
        .find(|c| c.role() == Role::Dependent && c.kind() == ColumnKind::Numeric)
        .map(|c| c.name().to_string())
}

fn improvement_report(
    dependent: &str,
    summaries: &[ClusterSummary],
) -> Result<Improvement, CliError> {
    let mut means: Vec<(usize, f64)> = Vec::new();
    for s in summaries {
        match s.numeric_means.get(dependent) {
            Some(&m) => means.push((s.cluster, m)),
            None => {
                return Err(CliError::from(Error::Lookup(format!(
                    "dependent {dependent} missing from cluster {} summary",
                    s.cluster
                ))))
            }
        }
    }
    let (best_cluster, best_mean) = means
        .iter()
        .copied()
        .fold(None::<(usize, f64)>, |acc, (c, m)| match acc {
            Some((_, bm)) if bm >= m => acc,
            _ => Some((c, m)),
        })
        .expect("at least one cluster");
    let (worst_cluster, worst_mean) = means
        .iter()
        .copied()
        .fold(None::<(usize, f64)>, |acc, (c, m)| match acc {
            Some((_, wm)) if wm <= m => acc,
            _ => Some((c, m)),
        })
        .expect("at least one cluster");
    let ratio = improvement_percent(best_mean, worst_mean).map_err(CliError::from)?;
    Ok(Improvement {
        dependent: dependent.to_string(),
        best_cluster,
        best_mean,
        worst_cluster,
        worst_mean,
        ratio_percent: ratio,
        increase_percent: ratio - 100.0,
    })
}
