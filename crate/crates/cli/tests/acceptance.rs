//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! The criteria run against planted synthetic data whose ground truth is
//! known by construction, plus brute-force oracles for the numeric kernels.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use tabkit_cli::config::{KChoice, RunConfig};
use tabkit_cli::io;
use tabkit_cli::pipeline::{run_pipeline, RunReport};
use tabkit_core::cluster::{adjusted_rand_index, lloyd, KMeansOptions};
use tabkit_core::interpret::improvement_percent;
use tabkit_core::math;
use tabkit_core::matrix::Matrix;
use tabkit_core::metrics::{mae, r2, rmse};
use tabkit_core::pca::{components_for_threshold, fit_pca, project, reconstruct};
use tabkit_core::preprocess::{knn_impute, trim_outliers, ImputeConfig};
use tabkit_core::rng::SplitMix64;
use tabkit_core::stats::{column_stats, quantile};
use tabkit_core::synth::{generate, ClusterArchetype, SynthColumn, SynthSpec};
use tabkit_core::table::{Column, ColumnKind, Role, Table};

/// Run one criterion, printing its PASS/FAIL line.
fn criterion<F: FnOnce()>(number: u32, description: &str, body: F) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(()) => println!("PASS criterion {number}: {description}"),
        Err(e) => {
            println!("FAIL criterion {number}: {description}");
            std::panic::resume_unwind(e);
        }
    }
}

/// Default planted dataset written to disk plus the pipeline run over it.
fn planted_run(dir: &Path) -> (RunReport, Vec<usize>) {
    let spec = SynthSpec::campaign_analogue(900, 42);
    let (table, labels) = generate(&spec).expect("generate");
    let input = dir.join("synth.csv");
    io::write_csv(&table, &input).expect("write csv");
    io::write_schema(&table, &io::sidecar_schema_path(&input)).expect("write schema");

    let config = RunConfig {
        input,
        out: dir.join("run"),
        seed: 42,
        k: KChoice::Auto,
        ..RunConfig::default()
    };
    let report = run_pipeline(&config).expect("pipeline");
    (report, labels)
}

/// Planted label for a synthetic row id of the form `c00042`.
fn planted_label(labels: &[usize], row_id: &str) -> usize {
    let index: usize = row_id.trim_start_matches('c').parse().expect("row id");
    labels[index]
}

#[test]
fn criterion_1_planted_recovery() {
    criterion(1, "elbow picks k = 3 and ARI >= 0.9 in under 10 s", || {
        let dir = tempfile::tempdir().unwrap();
        let started = Instant::now();
        let (report, labels) = planted_run(dir.path());
        let elapsed = started.elapsed();

        let elbow = report.elbow.as_ref().expect("elbow ran");
        assert_eq!(elbow.chosen_k, 3, "elbow chose {}", elbow.chosen_k);
        assert_eq!(report.kmeans.k, 3);

        let truth: Vec<usize> = report
            .row_ids
            .iter()
            .map(|id| planted_label(&labels, id))
            .collect();
        let ari = adjusted_rand_index(&truth, &report.kmeans.assignments).unwrap();
        assert!(ari >= 0.9, "adjusted Rand index {ari}");

        assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    });
}

#[test]
fn criterion_2_cluster_summary_reproduction() {
    criterion(
        2,
        "m = 7 summaries recover planted modes and means; 3367.00 / 1018.28 = 330.7 +/- 0.1",
        || {
            let dir = tempfile::tempdir().unwrap();
            let (report, labels) = planted_run(dir.path());
            let spec = SynthSpec::campaign_analogue(900, 42);

            // map each cluster to the archetype of the majority of its rows
            for summary in &report.summaries {
                assert_eq!(summary.m_used, 7, "summaries use the 7 nearest rows");
                let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
                for (i, &a) in report.kmeans.assignments.iter().enumerate() {
                    if a == summary.cluster {
                        *votes
                            .entry(planted_label(&labels, &report.row_ids[i]))
                            .or_insert(0) += 1;
                    }
                }
                let (&archetype_idx, _) = votes
                    .iter()
                    .max_by_key(|(_, &count)| count)
                    .expect("members");
                let archetype = &spec.archetypes[archetype_idx];

                // the 7 nearest-to-centroid rows all carry the planted label
                let q = report.q_components;
                let mut points = Matrix::zeros(report.scores.rows(), q);
                for i in 0..report.scores.rows() {
                    for j in 0..q {
                        points.set(i, j, report.scores.get(i, j));
                    }
                }
                let nearest = tabkit_core::cluster::nearest_to_centroid(
                    &report.kmeans,
                    &points,
                    summary.cluster,
                    7,
                )
                .unwrap();
                for &row in &nearest {
                    assert_eq!(
                        planted_label(&labels, &report.row_ids[row]),
                        archetype_idx,
                        "nearest row {row} of cluster {} has a foreign planted label",
                        summary.cluster
                    );
                }

                for (column, expected) in &archetype.categorical_values {
                    assert_eq!(
                        summary.categorical_modes.get(column),
                        Some(expected),
                        "cluster {} mode for {column}",
                        summary.cluster
                    );
                }
                for (column, &expected) in &archetype.numeric_means {
                    let got = summary.numeric_means[column];
                    assert!(
                        (got - expected).abs() <= 0.05 * expected.abs(),
                        "cluster {} mean for {column}: {got} vs planted {expected}",
                        summary.cluster
                    );
                }
            }

            // the published comparison, with the means set to the reported values
            let ratio = improvement_percent(3367.00, 1018.28).unwrap();
            assert!((ratio - 330.7).abs() <= 0.1, "ratio {ratio}");
        },
    );
}

#[test]
fn criterion_3_pca_correctness() {
    criterion(
        3,
        "orthonormal components, unit ratio sum, 1e-6 reconstruction, threshold q = 4",
        || {
            // variance shares tuned so four components reach 95% and the
            // first two carry nearly 90%
            let shares = [0.62, 0.26, 0.05, 0.04, 0.02, 0.01];
            let columns: Vec<SynthColumn> = (0..6)
                .map(|i| SynthColumn::new(&format!("f{i}"), ColumnKind::Numeric, Role::Independent))
                .collect();
            let archetype = ClusterArchetype {
                label: 0,
                weight: 1.0,
                categorical_values: BTreeMap::new(),
                numeric_means: (0..6).map(|i| (format!("f{i}"), 10.0)).collect(),
                numeric_stds: (0..6)
                    .map(|i| (format!("f{i}"), math::sqrt(shares[i])))
                    .collect(),
            };
            let spec = SynthSpec {
                n_rows: 2000,
                columns,
                archetypes: vec![archetype],
                missing_rates: BTreeMap::new(),
                categorical_noise: 0.0,
                truncate_at_zero: Default::default(),
                seed: 7,
            };
            let (table, _) = generate(&spec).expect("generate");
            let names: Vec<&str> = (0..6)
                .map(|i| Box::leak(format!("f{i}").into_boxed_str()) as &str)
                .collect();
            let model = fit_pca(&table, &names).expect("fit");

            // orthonormality in the infinity norm
            let gram = model.components.mul_transpose(&model.components).unwrap();
            let mut worst = 0.0f64;
            for i in 0..6 {
                for j in 0..6 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((gram.get(i, j) - expect).abs());
                }
            }
            assert!(worst <= 1e-9, "orthonormality defect {worst}");

            let ratio_sum: f64 = model.explained_variance_ratio.iter().sum();
            assert!((ratio_sum - 1.0).abs() <= 1e-9, "ratio sum {ratio_sum}");

            // full-rank round trip
            let scores = project(&model, &table, 6).unwrap();
            let back = reconstruct(&model, &scores).unwrap();
            let mut x = Matrix::zeros(table.row_count(), 6);
            for (j, name) in names.iter().enumerate() {
                let values = table.column(name).unwrap().present_numeric().unwrap();
                for (i, v) in values.iter().enumerate() {
                    x.set(i, j, *v);
                }
            }
            let err = back.frobenius_distance(&x);
            assert!(err <= 1e-6, "reconstruction error {err}");

            assert_eq!(components_for_threshold(&model, 0.95), 4);
            let cum2: f64 = model.explained_variance_ratio[..2].iter().sum();
            assert!(cum2 >= 0.85, "first two components carry {cum2}");
        },
    );
}

/// Exhaustive k-means optimum by enumerating every assignment.
fn exhaustive_best_inertia(points: &Matrix, k: usize) -> f64 {
    let n = points.rows();
    assert!(n <= 12 && k <= 3);
    let mut best = f64::INFINITY;
    for code in 0..(k as u64).pow(n as u32) {
        let mut c = code;
        let mut assignment = Vec::with_capacity(n);
        for _ in 0..n {
            assignment.push((c % k as u64) as usize);
            c /= k as u64;
        }
        let mut sums = vec![vec![0.0; points.cols()]; k];
        let mut counts = vec![0usize; k];
        for (i, &a) in assignment.iter().enumerate() {
            counts[a] += 1;
            for j in 0..points.cols() {
                sums[a][j] += points.get(i, j);
            }
        }
        if counts.iter().any(|&c| c == 0) {
            continue;
        }
        let mut total = 0.0;
        for (i, &a) in assignment.iter().enumerate() {
            for j in 0..points.cols() {
                let centroid = sums[a][j] / counts[a] as f64;
                let d = points.get(i, j) - centroid;
                total += d * d;
            }
        }
        if total < best {
            best = total;
        }
    }
    best
}

#[test]
fn criterion_4_kmeans_matches_exhaustive_oracle() {
    criterion(
        4,
        "best-of-10 restarts equals the exhaustive optimum; Lloyd inertia never rises",
        || {
            // documented small instances (n <= 12, k <= 3)
            let instances: Vec<(Matrix, usize, f64)> = vec![
                // two pairs on a line: optimum 4 * 0.5^2
                (
                    Matrix::from_vec(4, 1, vec![0.0, 1.0, 10.0, 11.0]).unwrap(),
                    2,
                    1.0,
                ),
                // three triplets on a line
                (
                    Matrix::from_vec(
                        9,
                        1,
                        vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 20.0, 21.0, 22.0],
                    )
                    .unwrap(),
                    3,
                    6.0,
                ),
                // square corners in two clusters
                (
                    Matrix::from_vec(4, 2, vec![0.0, 0.0, 0.0, 1.0, 8.0, 0.0, 8.0, 1.0]).unwrap(),
                    2,
                    1.0,
                ),
            ];
            let opts = KMeansOptions::default();
            for (points, k, documented) in &instances {
                let model = tabkit_core::cluster::kmeans_fit(points, *k, 42, &opts).expect("fit");
                let oracle = exhaustive_best_inertia(points, *k);
                assert!(
                    (model.inertia - oracle).abs() <= 1e-9,
                    "inertia {} vs exhaustive {oracle}",
                    model.inertia
                );
                assert!((oracle - documented).abs() <= 1e-9, "oracle {oracle}");
            }

            // random instances: never below the optimum
            let mut rng = SplitMix64::new(4242);
            for trial in 0..40 {
                let n = 6 + (trial % 7);
                let k = 2 + (trial % 2);
                let data: Vec<f64> = (0..n).map(|_| rng.next_normal() * 4.0).collect();
                let points = Matrix::from_vec(n, 1, data).unwrap();
                let model =
                    tabkit_core::cluster::kmeans_fit(&points, k, trial as u64, &opts).unwrap();
                let oracle = exhaustive_best_inertia(&points, k);
                assert!(model.inertia >= oracle - 1e-9);
            }

            // Lloyd monotonicity over 1000 random runs
            let mut rng = SplitMix64::new(9999);
            for run in 0..1000 {
                let n = 20;
                let data: Vec<f64> = (0..n * 2).map(|_| rng.next_normal() * 3.0).collect();
                let points = Matrix::from_vec(n, 2, data).unwrap();
                let mut seed_rng = SplitMix64::stream(run, 0);
                let start_rows = seed_rng.sample_indices(n, 3);
                let mut start = Vec::new();
                for &r in &start_rows {
                    start.extend_from_slice(points.row(r));
                }
                let start = Matrix::from_vec(3, 2, start).unwrap();
                let trace = lloyd(&points, &start, 300, 1e-4).inertia_trace;
                for w in trace.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9, "run {run}: inertia rose {w:?}");
                }
            }
        },
    );
}

#[test]
fn criterion_5_imputation_quality() {
    criterion(
        5,
        "k-NN imputation beats mean imputation; k = 1 duplicates reproduce exactly",
        || {
            let mut spec = SynthSpec::campaign_analogue(300, 11);
            spec.missing_rates.clear();
            let (complete, _) = generate(&spec).expect("generate");

            // mask 10% of the numeric cells
            let mut rng = SplitMix64::new(512);
            let mut masked = complete.clone();
            let mut truth: Vec<(String, usize, f64)> = Vec::new();
            for col in complete.columns() {
                if col.kind() != ColumnKind::Numeric {
                    continue;
                }
                let values = col.numeric_values().unwrap();
                let mut cells = values.to_vec();
                for (row, cell) in cells.iter_mut().enumerate() {
                    if rng.next_f64() < 0.10 {
                        truth.push((col.name().to_string(), row, cell.unwrap()));
                        *cell = None;
                    }
                }
                masked = masked
                    .with_column_replaced(
                        col.name(),
                        Column::numeric(col.name(), col.role(), cells).unwrap(),
                    )
                    .unwrap();
            }
            assert!(truth.len() > 100, "mask produced {} holes", truth.len());

            let imputed = knn_impute(&masked, &ImputeConfig::new(5)).expect("impute");
            let knn_rmse = {
                let mut sq = 0.0;
                for (name, row, expected) in &truth {
                    let got = imputed.column(name).unwrap().numeric_values().unwrap()[*row]
                        .expect("filled");
                    sq += (got - expected) * (got - expected);
                }
                math::sqrt(sq / truth.len() as f64)
            };

            // column-mean oracle over the observed cells
            let mean_rmse = {
                let mut sq = 0.0;
                for (name, row, expected) in &truth {
                    let present = masked.column(name).unwrap().present_numeric().unwrap();
                    let mean = present.iter().sum::<f64>() / present.len() as f64;
                    let _ = row;
                    sq += (mean - expected) * (mean - expected);
                }
                math::sqrt(sq / truth.len() as f64)
            };
            assert!(
                knn_rmse < mean_rmse,
                "knn rmse {knn_rmse} not below mean-imputation rmse {mean_rmse}"
            );

            // duplicated rows with one cell masked: k = 1 restores exactly
            let table = Table::new(vec![
                Column::numeric(
                    "a",
                    Role::Independent,
                    vec![Some(1.0), Some(1.0), Some(5.0), Some(9.0)],
                )
                .unwrap(),
                Column::numeric(
                    "b",
                    Role::Independent,
                    vec![Some(2.25), None, Some(7.0), Some(3.0)],
                )
                .unwrap(),
            ])
            .unwrap();
            let filled = knn_impute(&table, &ImputeConfig::new(1)).unwrap();
            assert_eq!(
                filled.column("b").unwrap().numeric_values().unwrap()[1],
                Some(2.25)
            );
        },
    );
}

#[test]
fn criterion_6_trimming_reduces_tail_weight() {
    criterion(
        6,
        "10% trim strictly lowers lognormal kurtosis and skewness; cells stay in bounds",
        || {
            let mut rng = SplitMix64::new(2718);
            let values: Vec<Option<f64>> = (0..1000)
                .map(|_| Some(math::exp(rng.next_normal())))
                .collect();
            let table = Table::new(vec![Column::numeric(
                "v",
                Role::Independent,
                values.clone(),
            )
            .unwrap()])
            .unwrap();

            let before = column_stats(&table, "v").unwrap();
            let (trimmed, bounds) = trim_outliers(&table, &["v"], 0.10).unwrap();
            let after = column_stats(&trimmed, "v").unwrap();

            assert!(
                after.kurtosis_population < before.kurtosis_population,
                "kurtosis {} -> {}",
                before.kurtosis_population,
                after.kurtosis_population
            );
            assert!(
                after.skewness_population < before.skewness_population,
                "skewness {} -> {}",
                before.skewness_population,
                after.skewness_population
            );

            let raw: Vec<f64> = values.iter().map(|v| v.unwrap()).collect();
            let q10 = quantile(&raw, 0.10).unwrap();
            let q90 = quantile(&raw, 0.90).unwrap();
            assert!((bounds[0].lower - q10).abs() < 1e-12);
            assert!((bounds[0].upper - q90).abs() < 1e-12);
            for x in trimmed.column("v").unwrap().present_numeric().unwrap() {
                assert!(x >= q10 && x <= q90);
            }
        },
    );
}

#[test]
fn criterion_7_metric_identities() {
    criterion(
        7,
        "rmse >= mae on 1000 random vectors; exact R^2 and hand-derived values",
        || {
            let mut rng = SplitMix64::new(31415);
            for _ in 0..1000 {
                let n = 1 + rng.next_index(40);
                let h: Vec<f64> = (0..n).map(|_| rng.next_normal() * 10.0).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.next_normal() * 10.0).collect();
                assert!(rmse(&h, &y).unwrap() >= mae(&h, &y).unwrap() - 1e-12);
            }

            let y = vec![1.0, 2.0, 3.0];
            assert_eq!(r2(&y, &y).unwrap(), 1.0);
            assert_eq!(r2(&[2.0, 2.0, 2.0], &y).unwrap(), 0.0);

            assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - math::sqrt(12.5)).abs() <= 1e-9);
            assert!((mae(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 3.5).abs() <= 1e-9);
        },
    );
}

/// Hash every file under `dir`, keyed by relative path.
fn hash_tree(dir: &Path) -> BTreeMap<String, String> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path
                    .strip_prefix(base)
                    .unwrap()
                    .to_string_lossy()
                    .to_string();
                out.insert(rel, tabkit_cli::manifest::sha256_file(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn criterion_8_pipeline_determinism() {
    criterion(
        8,
        "re-running an identical config is byte-identical, SVGs included",
        || {
            let dir = tempfile::tempdir().unwrap();
            let spec = SynthSpec::campaign_analogue(400, 7);
            let (table, _) = generate(&spec).unwrap();
            let input = dir.path().join("synth.csv");
            io::write_csv(&table, &input).unwrap();
            io::write_schema(&table, &io::sidecar_schema_path(&input)).unwrap();

            let config = RunConfig {
                input,
                out: dir.path().join("run"),
                seed: 99,
                ..RunConfig::default()
            };
            run_pipeline(&config).expect("first run");
            let first = hash_tree(&config.out);
            assert!(
                first.keys().any(|k| k.ends_with(".svg")),
                "run emitted SVGs"
            );

            std::fs::remove_dir_all(&config.out).unwrap();
            run_pipeline(&config).expect("second run");
            let second = hash_tree(&config.out);

            assert_eq!(first, second, "output trees differ");
        },
    );
}
