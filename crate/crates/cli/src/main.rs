//! `tabkit`: a reproducible tabular clustering pipeline.
//!
//! Subcommands mirror the pipeline stages so each is independently runnable
//! on the previous stage's CSV artifacts; `pipeline` is their fixed
//! composition. Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use tabkit_cli::config::{KChoice, RunConfig};
use tabkit_cli::{io, manifest, pipeline, CliError};
use tabkit_core::cluster::{
    elbow_sweep, inertia, kmeans_fit, nearest_to_centroid, KMeansModel, KMeansOptions,
};
use tabkit_core::interpret::summarize_clusters;
use tabkit_core::metrics::regression_metrics;
use tabkit_core::pca::{components_for_threshold, fit_pca, project};
use tabkit_core::preprocess::{
    encode_labels, knn_impute, standardize, trim_outliers, winsorize, ImputeConfig,
};
use tabkit_core::stats::column_stats;
use tabkit_core::synth::{generate, SynthSpec};
use tabkit_core::table::{ColumnKind, Role};

#[derive(Parser)]
#[command(
    name = "tabkit",
    version,
    about = "Tabular unsupervised-learning toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the default planted-cluster synthetic dataset.
    Synth(SynthArgs),
    /// Validate a CSV against a schema and report record counts.
    Ingest(IngestArgs),
    /// Per-column moment statistics (count, mean, skewness, kurtosis).
    Stats(StatsArgs),
    /// Encode, impute, trim and standardize a dataset.
    Preprocess(PreprocessArgs),
    /// Fit a PCA model and project scores.
    Pca(PcaArgs),
    /// K-means clustering with optional elbow selection.
    Cluster(ClusterArgs),
    /// Summarize clusters from the nearest-to-centroid rows.
    Summarize(SummarizeArgs),
    /// Regression error measures between two vectors.
    Metrics(MetricsArgs),
    /// Run the full pipeline and emit every artifact.
    Pipeline(Box<PipelineArgs>),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long, default_value = "synth-out")]
    out: PathBuf,
    /// Number of rows to generate.
    #[arg(long, default_value_t = 907)]
    rows: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Skip missing-value injection.
    #[arg(long)]
    complete: bool,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// Schema CSV (`name,kind,role`); defaults to `<input>.schema.csv`.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Write a canonical copy here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long, default_value = "stats.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = "preprocess-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    impute_k: usize,
    #[arg(long, default_value_t = 0.10)]
    trim_fraction: f64,
    /// Clip to the quantile bounds instead of dropping rows.
    #[arg(long)]
    winsorize: bool,
}

#[derive(Args)]
struct PcaArgs {
    /// Preprocessed CSV (numeric feature columns).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = "pca-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    variance_threshold: f64,
}

#[derive(Args)]
struct ClusterArgs {
    /// Scores CSV (`row_id` plus numeric columns).
    #[arg(long)]
    input: PathBuf,
    /// `auto` for elbow selection or a fixed integer.
    #[arg(long, default_value = "auto")]
    k: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long, default_value = "cluster-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Presentation table (original units).
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Scores or feature matrix the clustering ran on.
    #[arg(long)]
    points: PathBuf,
    /// Assignments CSV from the cluster stage.
    #[arg(long)]
    assignments: PathBuf,
    /// Centroids CSV from the cluster stage.
    #[arg(long)]
    centroids: PathBuf,
    #[arg(long, default_value_t = 7)]
    summary_m: usize,
    #[arg(long, default_value = "summary.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Predictions CSV (first column, header skipped).
    #[arg(long)]
    pred: PathBuf,
    /// Target values CSV (first column, header skipped).
    #[arg(long = "true")]
    truth: PathBuf,
    /// Output CSV path.
    #[arg(long, default_value = "metrics.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` config file or an emitted run manifest; command
    /// line flags win over file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `auto` or a fixed integer.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    impute_k: Option<usize>,
    #[arg(long)]
    trim_fraction: Option<f64>,
    #[arg(long)]
    variance_threshold: Option<f64>,
    #[arg(long)]
    summary_m: Option<usize>,
    #[arg(long)]
    nearest_m: Option<usize>,
    /// Comma-separated permutation of encode,impute,trim,standardize.
    #[arg(long)]
    stage_order: Option<String>,
    /// Dependent column for the cross-cluster comparison.
    #[arg(long)]
    dependent: Option<String>,
    #[arg(long)]
    winsorize: bool,
    /// Fit PCA on unstandardized (raw covariance) features.
    #[arg(long)]
    pca_raw: bool,
    /// Cluster in the full standardized feature space instead of the
    /// top components.
    #[arg(long)]
    cluster_full_space: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => synth_cmd(args),
        Command::Ingest(args) => ingest_cmd(args),
        Command::Stats(args) => stats_cmd(args),
        Command::Preprocess(args) => preprocess_cmd(args),
        Command::Pca(args) => pca_cmd(args),
        Command::Cluster(args) => cluster_cmd(args),
        Command::Summarize(args) => summarize_cmd(args),
        Command::Metrics(args) => metrics_cmd(args),
        Command::Pipeline(args) => pipeline_cmd(*args),
    }
}

fn synth_cmd(args: SynthArgs) -> Result<(), CliError> {
    let mut spec = SynthSpec::campaign_analogue(args.rows, args.seed);
    if args.complete {
        spec.missing_rates.clear();
    }
    let (table, labels) = generate(&spec).map_err(CliError::from)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    io::write_csv(&table, &args.out.join("synth.csv"))?;
    io::write_schema(&table, &args.out.join("synth.schema.csv"))?;
    io::write_labels_csv(
        &io::row_ids(&table),
        &labels,
        &args.out.join("synth_labels.csv"),
    )?;
    std::fs::write(args.out.join("synth_spec.txt"), describe_spec(&spec))
        .map_err(|e| CliError::Data(e.to_string()))?;
    info!(
        "synth: wrote {} rows x {} columns to {}",
        table.row_count(),
        table.columns().len(),
        args.out.display()
    );
    Ok(())
}

fn describe_spec(spec: &SynthSpec) -> String {
    let mut text = String::from("# synthetic generator spec\n");
    text.push_str(&format!("n_rows = {}\n", spec.n_rows));
    text.push_str(&format!("seed = {}\n", spec.seed));
    text.push_str(&format!("categorical_noise = {}\n", spec.categorical_noise));
    text.push_str("\n[columns]\n");
    for col in &spec.columns {
        text.push_str(&format!(
            "{} kind={} role={}\n",
            col.name,
            col.kind.as_str(),
            col.role.as_str()
        ));
    }
    text.push_str("\n[archetypes]\n");
    for a in &spec.archetypes {
        text.push_str(&format!("label = {} weight = {}\n", a.label, a.weight));
        for (col, value) in &a.categorical_values {
            text.push_str(&format!("  {col} = {value}\n"));
        }
        for (col, mean) in &a.numeric_means {
            text.push_str(&format!(
                "  {col} ~ Normal({mean}, {})\n",
                a.numeric_stds[col]
            ));
        }
    }
    text.push_str("\n[missing_rates]\n");
    for (col, rate) in &spec.missing_rates {
        text.push_str(&format!("{col} = {rate}\n"));
    }
    text
}

fn ingest_cmd(args: IngestArgs) -> Result<(), CliError> {
    let table = io::load_with_sidecar(&args.input, args.schema.as_deref())?;
    println!("rows: {}", table.row_count());
    println!("columns: {}", table.columns().len());
    for col in table.columns() {
        if col.role() == Role::Dependent {
            println!("records[{}]: {}", col.name(), col.present_count());
        }
    }
    if let Some(out) = args.out {
        io::write_csv(&table, &out)?;
        io::write_schema(&table, &io::sidecar_schema_path(&out))?;
    }
    Ok(())
}

fn stats_cmd(args: StatsArgs) -> Result<(), CliError> {
    let table = io::load_with_sidecar(&args.input, args.schema.as_deref())?;
    let mut stats = Vec::new();
    for col in table.columns() {
        if col.kind() != ColumnKind::Numeric {
            continue;
        }
        match column_stats(&table, col.name()) {
            Ok(s) => stats.push(s),
            Err(e) => log::warn!("stats: skipped {}: {e}", col.name()),
        }
    }
    io::write_stats_csv(&stats, &args.out)?;
    info!(
        "stats: wrote {} rows to {}",
        stats.len(),
        args.out.display()
    );
    Ok(())
}

fn preprocess_cmd(args: PreprocessArgs) -> Result<(), CliError> {
    let table = io::load_with_sidecar(&args.input, args.schema.as_deref())?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;

    let categorical: Vec<String> = table.names_where(|c| c.kind() == ColumnKind::Categorical);
    let cat_refs: Vec<&str> = categorical.iter().map(String::as_str).collect();
    let (encoded, maps) = encode_labels(&table, &cat_refs).map_err(CliError::from)?;

    let impute_config = ImputeConfig::new(args.impute_k)
        .with_mode_columns(maps.iter().map(|m| m.column.clone()).collect());
    let imputed = knn_impute(&encoded, &impute_config).map_err(CliError::from)?;

    let trim_cols: Vec<String> =
        table.names_where(|c| c.kind() == ColumnKind::Numeric && c.role() == Role::Independent);
    let trim_refs: Vec<&str> = trim_cols.iter().map(String::as_str).collect();
    let (trimmed, bounds) = if args.winsorize {
        winsorize(&imputed, &trim_refs, args.trim_fraction).map_err(CliError::from)?
    } else {
        trim_outliers(&imputed, &trim_refs, args.trim_fraction).map_err(CliError::from)?
    };

    let features: Vec<String> = trimmed.names_where(|c| {
        c.kind() == ColumnKind::Numeric
            && c.role() == Role::Independent
            && c.present_numeric()
                .is_ok_and(|v| v.iter().any(|x| *x != v[0]))
    });
    let feature_refs: Vec<&str> = features.iter().map(String::as_str).collect();
    let (standardized, params) = standardize(&trimmed, &feature_refs).map_err(CliError::from)?;

    io::write_csv(&standardized, &args.out.join("processed.csv"))?;
    io::write_schema(&standardized, &args.out.join("processed.schema.csv"))?;

    let mut b = manifest::ManifestBuilder::new();
    b.encodings(&maps)
        .standardizations(&params)
        .trim_bounds(&bounds);
    b.write(&args.out.join("artifacts.txt"))?;
    info!(
        "preprocess: {} -> {} rows, artifacts in {}",
        table.row_count(),
        standardized.row_count(),
        args.out.display()
    );
    Ok(())
}

fn pca_cmd(args: PcaArgs) -> Result<(), CliError> {
    let table = io::load_with_sidecar(&args.input, args.schema.as_deref())?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    let features: Vec<String> =
        table.names_where(|c| c.kind() == ColumnKind::Numeric && c.role() == Role::Independent);
    let refs: Vec<&str> = features.iter().map(String::as_str).collect();
    let model = fit_pca(&table, &refs).map_err(CliError::from)?;
    let q = components_for_threshold(&model, args.variance_threshold);

    let scores = project(&model, &table, model.n_features()).map_err(CliError::from)?;
    let names: Vec<String> = (1..=model.n_features()).map(|i| format!("pc{i}")).collect();
    io::write_matrix_csv(
        &io::row_ids(&table),
        &scores,
        &names,
        &args.out.join("scores.csv"),
    )?;

    let mut b = manifest::ManifestBuilder::new();
    b.pca(&model);
    b.write(&args.out.join("pca_model.txt"))?;

    println!(
        "components_for_threshold({}) = {q}",
        args.variance_threshold
    );
    Ok(())
}

fn cluster_cmd(args: ClusterArgs) -> Result<(), CliError> {
    let (ids, points, _) = io::load_matrix_csv(&args.input)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    let opts = KMeansOptions::default();
    let k = KChoice::parse(&args.k)?;
    let model = match k {
        KChoice::Fixed(k) => kmeans_fit(&points, k, args.seed, &opts).map_err(CliError::from)?,
        KChoice::Auto => {
            let k_max = args.k_max.min(points.rows().saturating_sub(1));
            let curve = elbow_sweep(&points, 1, k_max, args.seed, &opts).map_err(CliError::from)?;
            io::write_elbow_csv(&curve.ks, &curve.inertias, &args.out.join("elbow.csv"))?;
            println!("chosen_k = {}", curve.chosen_k);
            kmeans_fit(&points, curve.chosen_k, args.seed, &opts).map_err(CliError::from)?
        }
    };
    io::write_assignments_csv(&ids, &model.assignments, &args.out.join("assignments.csv"))?;
    let centroid_ids: Vec<String> = (0..model.k).map(|c| c.to_string()).collect();
    let names: Vec<String> = (1..=points.cols()).map(|i| format!("pc{i}")).collect();
    io::write_matrix_csv(
        &centroid_ids,
        &model.centroids,
        &names,
        &args.out.join("centroids.csv"),
    )?;
    println!("k = {}, inertia = {}", model.k, model.inertia);
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<(), CliError> {
    let table = io::load_with_sidecar(&args.table, args.schema.as_deref())?;
    let (_, points, _) = io::load_matrix_csv(&args.points)?;
    let (_, centroids, _) = io::load_matrix_csv(&args.centroids)?;
    let pairs = io::load_two_column_csv(&args.assignments)?;
    let assignments: Vec<usize> = pairs
        .iter()
        .map(|(_, c)| {
            c.parse::<usize>()
                .map_err(|_| CliError::Data(format!("bad cluster index `{c}`")))
        })
        .collect::<Result<_, _>>()?;
    let model = KMeansModel {
        k: centroids.rows(),
        inertia: inertia(&points, &centroids, &assignments).map_err(CliError::from)?,
        centroids,
        assignments,
        seed: 0,
        iterations_run: 0,
        restarts: 0,
    };
    let summaries =
        summarize_clusters(&table, &model, &points, args.summary_m).map_err(CliError::from)?;
    pipeline::write_summary_csv(&summaries, &table, &args.out)?;
    for cluster in 0..model.k {
        let m = args
            .summary_m
            .min(model.assignments.iter().filter(|&&a| a == cluster).count());
        let nearest = nearest_to_centroid(&model, &points, cluster, m).map_err(CliError::from)?;
        info!("cluster {cluster}: nearest rows {nearest:?}");
    }
    info!("summarize: wrote {}", args.out.display());
    Ok(())
}

fn metrics_cmd(args: MetricsArgs) -> Result<(), CliError> {
    let pred = io::load_vector_csv(&args.pred)?;
    let truth = io::load_vector_csv(&args.truth)?;
    let m = regression_metrics(&pred, &truth).map_err(CliError::from)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    writer
        .write_record(["rmse", "mae", "r2"])
        .map_err(|e| CliError::Data(e.to_string()))?;
    writer
        .write_record([
            format!("{}", m.rmse),
            format!("{}", m.mae),
            format!("{}", m.r2),
        ])
        .map_err(|e| CliError::Data(e.to_string()))?;
    writer.flush().map_err(|e| CliError::Data(e.to_string()))?;
    println!("rmse = {}", m.rmse);
    println!("mae = {}", m.mae);
    println!("r2 = {}", m.r2);
    Ok(())
}

fn pipeline_cmd(args: PipelineArgs) -> Result<(), CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        for (key, value) in tabkit_cli::config::read_config_file(path)? {
            config.apply_entry(&key, &value)?;
        }
    }
    // flags win over config-file entries
    if let Some(input) = args.input {
        config.input = input;
    }
    if let Some(schema) = args.schema {
        config.schema = Some(schema);
    }
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(k) = args.k {
        config.k = KChoice::parse(&k)?;
    }
    if let Some(v) = args.impute_k {
        config.impute_k = v;
    }
    if let Some(v) = args.trim_fraction {
        config.trim_fraction = v;
    }
    if let Some(v) = args.variance_threshold {
        config.variance_threshold = v;
    }
    if let Some(v) = args.summary_m {
        config.summary_m = v;
    }
    if let Some(v) = args.nearest_m {
        config.nearest_m = v;
    }
    if let Some(v) = args.stage_order {
        config.stage_order = RunConfig::parse_stage_order(&v)?;
    }
    if let Some(v) = args.dependent {
        config.dependent = Some(v);
    }
    if args.winsorize {
        config.winsorize = true;
    }
    if args.pca_raw {
        config.pca_raw = true;
    }
    if args.cluster_full_space {
        config.cluster_full_space = true;
    }

    // every resolved setting is logged up front; nothing defaults silently
    for (key, value) in config.entries() {
        info!("config: {key} = {value}");
    }

    let report = pipeline::run_pipeline(&config)?;
    for line in &report.stage_log {
        info!("{line}");
    }
    println!("k = {}", report.kmeans.k);
    if let Some(imp) = &report.improvement {
        println!(
            "improvement[{}]: cluster {} mean {:.2} vs cluster {} mean {:.2} -> {:.1}% (ratio), {:+.1}% (increase)",
            imp.dependent,
            imp.best_cluster,
            imp.best_mean,
            imp.worst_cluster,
            imp.worst_mean,
            imp.ratio_percent,
            imp.increase_percent
        );
    }
    println!("artifacts: {}", config.out.display());
    Ok(())
}
