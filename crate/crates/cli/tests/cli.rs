//! Integration tests for the `tabkit` binary and the stage subcommands.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tabkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tabkit"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().to_string()
}

#[test]
fn synth_then_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    let out = tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "400",
        "--seed",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for file in [
        "synth.csv",
        "synth.schema.csv",
        "synth_labels.csv",
        "synth_spec.txt",
    ] {
        assert!(synth_dir.join(file).exists(), "missing {file}");
    }

    let run_dir = dir.path().join("run");
    let out = tabkit(&[
        "pipeline",
        "--input",
        &path_str(&synth_dir.join("synth.csv")),
        "--out",
        &path_str(&run_dir),
        "--k",
        "auto",
        "--seed",
        "42",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("k = 3"), "stdout: {stdout}");
    assert!(
        stdout.contains("improvement[schp_total]"),
        "stdout: {stdout}"
    );

    for file in [
        "01_ingested.csv",
        "02_stats_raw.csv",
        "03_encoded.csv",
        "04_imputed.csv",
        "05_trimmed.csv",
        "06_standardized.csv",
        "07_presentation.csv",
        "08_correlation.csv",
        "09_scores.csv",
        "09_variance_ratio.csv",
        "10_elbow.csv",
        "10_assignments.csv",
        "10_centroids.csv",
        "11_summary.csv",
        "11_improvement.txt",
        "run_manifest.txt",
    ] {
        assert!(run_dir.join(file).exists(), "missing {file}");
    }
    assert!(!run_dir.join("FAILED").exists());
    assert!(run_dir.join("report/manifest.txt").exists());

    // summary CSV has the expected one-column-per-cluster shape
    let summary = fs::read_to_string(run_dir.join("11_summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    assert_eq!(header, "variable,kind,cluster_0,cluster_1,cluster_2");
    assert!(summary.lines().any(|l| l.contains("(c)")));
    assert!(summary.lines().any(|l| l.contains("(n)")));

    // every figure comes with a CSV holding the plotted numbers
    let report_dir = run_dir.join("report");
    for entry in fs::read_dir(&report_dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "svg") {
            assert!(
                path.with_extension("csv").exists(),
                "no data csv for {path:?}"
            );
        }
    }

    // the presentation table restores pre-standardization units: its cells
    // match the trimmed snapshot within 1e-9
    let column_values = |path: &Path, name: &str| -> Vec<f64> {
        let mut reader = csv::Reader::from_path(path).unwrap();
        let idx = reader
            .headers()
            .unwrap()
            .iter()
            .position(|h| h == name)
            .unwrap();
        reader
            .records()
            .map(|r| r.unwrap().get(idx).unwrap().parse().unwrap())
            .collect()
    };
    let trimmed = column_values(&run_dir.join("05_trimmed.csv"), "ad_total");
    let presentation = column_values(&run_dir.join("07_presentation.csv"), "ad_total");
    assert_eq!(trimmed.len(), presentation.len());
    for (t, p) in trimmed.iter().zip(&presentation) {
        assert!(
            (t - p).abs() <= 1e-9 * t.abs().max(1.0),
            "unstandardize drifted: {t} vs {p}"
        );
    }
}

#[test]
fn forced_k_skips_elbow() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "200",
        "--seed",
        "1",
    ]);

    let run_dir = dir.path().join("run");
    let out = tabkit(&[
        "pipeline",
        "--input",
        &path_str(&synth_dir.join("synth.csv")),
        "--out",
        &path_str(&run_dir),
        "--k",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("k = 5"));
    assert!(
        !run_dir.join("10_elbow.csv").exists(),
        "elbow sweep should be skipped"
    );
}

#[test]
fn manifest_rerun_reproduces_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "250",
        "--seed",
        "9",
    ]);

    let run1 = dir.path().join("run1");
    let out = tabkit(&[
        "pipeline",
        "--input",
        &path_str(&synth_dir.join("synth.csv")),
        "--out",
        &path_str(&run1),
        "--seed",
        "7",
        "--trim-fraction",
        "0.12",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // feed the emitted manifest back as the config; only --out changes
    let run2 = dir.path().join("run2");
    let out = tabkit(&[
        "pipeline",
        "--config",
        &path_str(&run1.join("run_manifest.txt")),
        "--out",
        &path_str(&run2),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    for entry in fs::read_dir(&run1).unwrap() {
        let path = entry.unwrap().path();
        if !path.is_file() {
            continue;
        }
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name == "run_manifest.txt" {
            continue; // differs only in the recorded out path
        }
        let a = fs::read(&path).unwrap();
        let b = fs::read(run2.join(&name)).unwrap_or_default();
        assert_eq!(a, b, "artifact {name} differs after manifest re-run");
    }
}

#[test]
fn stats_subcommand_emits_moment_table() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "150",
        "--seed",
        "3",
    ]);

    let stats_csv = dir.path().join("stats.csv");
    let out = tabkit(&[
        "stats",
        "--input",
        &path_str(&synth_dir.join("synth.csv")),
        "--out",
        &path_str(&stats_csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&stats_csv).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "name,count_present,mean,std_sample,min,max,skewness_population,skewness_sample,kurtosis_population,kurtosis_excess_sample"
    );
    // one row per numeric column
    assert_eq!(text.lines().count(), 1 + 5);
}

#[test]
fn cluster_subcommand_emits_elbow_and_assignments() {
    let dir = tempfile::tempdir().unwrap();
    // hand-made scores file with three obvious blobs
    let scores = dir.path().join("scores.csv");
    let mut text = String::from("row_id,pc1,pc2\n");
    for i in 0..30 {
        let (cx, cy) = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)][i % 3];
        text.push_str(&format!(
            "r{i},{},{}\n",
            cx + (i as f64) * 1e-3,
            cy - (i as f64) * 1e-3
        ));
    }
    fs::write(&scores, text).unwrap();

    let out_dir = dir.path().join("cl");
    let out = tabkit(&[
        "cluster",
        "--input",
        &path_str(&scores),
        "--k",
        "auto",
        "--seed",
        "42",
        "--out",
        &path_str(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("chosen_k = 3"));
    assert!(out_dir.join("elbow.csv").exists());
    assert!(out_dir.join("assignments.csv").exists());
    assert!(out_dir.join("centroids.csv").exists());
    let assignments = fs::read_to_string(out_dir.join("assignments.csv")).unwrap();
    assert_eq!(assignments.lines().count(), 31);
    assert!(assignments.lines().nth(1).unwrap().starts_with("r0,"));
}

#[test]
fn metrics_subcommand_reports_measures() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("p.csv");
    let truth = dir.path().join("y.csv");
    fs::write(&pred, "value\n0\n0\n").unwrap();
    fs::write(&truth, "value\n3\n4\n").unwrap();

    let out_csv = dir.path().join("m.csv");
    let out = tabkit(&[
        "metrics",
        "--pred",
        &path_str(&pred),
        "--true",
        &path_str(&truth),
        "--out",
        &path_str(&out_csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("rmse = 3.5355339059327378"),
        "stdout: {stdout}"
    );
    assert!(stdout.contains("mae = 3.5"), "stdout: {stdout}");
    let text = fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("rmse,mae,r2"));
}

#[test]
fn exit_codes_reflect_error_category() {
    let dir = tempfile::tempdir().unwrap();

    // config error: invalid trim fraction
    let out = tabkit(&[
        "pipeline",
        "--input",
        "whatever.csv",
        "--out",
        &path_str(&dir.path().join("x")),
        "--trim-fraction",
        "0.9",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // data error: input file missing
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "100",
        "--seed",
        "2",
    ]);
    let out = tabkit(&[
        "pipeline",
        "--input",
        &path_str(&dir.path().join("missing.csv")),
        "--schema",
        &path_str(&synth_dir.join("synth.schema.csv")),
        "--out",
        &path_str(&dir.path().join("y")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("y").join("FAILED").exists());

    // numeric error: R^2 with constant targets is undefined
    let pred = dir.path().join("p.csv");
    let truth = dir.path().join("y.csv");
    fs::write(&pred, "v\n1\n2\n").unwrap();
    fs::write(&truth, "v\n5\n5\n").unwrap();
    let out = tabkit(&[
        "metrics",
        "--pred",
        &path_str(&pred),
        "--true",
        &path_str(&truth),
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ingest_reports_record_counts() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "300",
        "--seed",
        "8",
    ]);

    let out = tabkit(&["ingest", "--input", &path_str(&synth_dir.join("synth.csv"))]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rows: 300"));
    assert!(stdout.contains("records[schp_total]:"));
    assert!(stdout.contains("records[schm_total]: 300"));
}

#[test]
fn preprocess_pca_summarize_stage_chain() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    tabkit(&[
        "synth",
        "--out",
        &path_str(&synth_dir),
        "--rows",
        "300",
        "--seed",
        "4",
    ]);

    let pre_dir = dir.path().join("pre");
    let out = tabkit(&[
        "preprocess",
        "--input",
        &path_str(&synth_dir.join("synth.csv")),
        "--out",
        &path_str(&pre_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(pre_dir.join("processed.csv").exists());
    assert!(pre_dir.join("artifacts.txt").exists());

    let pca_dir = dir.path().join("pca");
    let out = tabkit(&[
        "pca",
        "--input",
        &path_str(&pre_dir.join("processed.csv")),
        "--out",
        &path_str(&pca_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("components_for_threshold"));
    assert!(pca_dir.join("scores.csv").exists());
    assert!(pca_dir.join("pca_model.txt").exists());

    let cl_dir = dir.path().join("cl");
    let out = tabkit(&[
        "cluster",
        "--input",
        &path_str(&pca_dir.join("scores.csv")),
        "--k",
        "3",
        "--out",
        &path_str(&cl_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary = dir.path().join("summary.csv");
    let out = tabkit(&[
        "summarize",
        "--table",
        &path_str(&pre_dir.join("processed.csv")),
        "--points",
        &path_str(&pca_dir.join("scores.csv")),
        "--assignments",
        &path_str(&cl_dir.join("assignments.csv")),
        "--centroids",
        &path_str(&cl_dir.join("centroids.csv")),
        "--out",
        &path_str(&summary),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&summary).unwrap();
    assert!(text.starts_with("variable,kind,cluster_0"));
}

#[test]
fn missing_upstream_artifact_names_the_file() {
    let out = tabkit(&[
        "cluster",
        "--input",
        "/nonexistent/scores.csv",
        "--k",
        "3",
        "--out",
        "/tmp/should-not-exist-tabkit",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("scores.csv"), "stderr: {stderr}");
}
