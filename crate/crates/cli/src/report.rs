//! Figure emission: every chart goes out as an SVG next to a CSV holding
//! exactly the plotted numbers, plus a manifest of content hashes.

use std::fs;
use std::path::Path;

use tabkit_core::chart::{render_chart, ChartData, ChartSpec, XySeries};
use tabkit_core::cluster::{nearest_to_centroid, ElbowCurve, KMeansModel};
use tabkit_core::matrix::Matrix;
use tabkit_core::pca::{biplot_loadings, PcaModel};
use tabkit_core::table::Table;

use crate::manifest::sha256_file;
use crate::CliError;

/// Everything the report stage draws from.
pub struct ReportInput<'a> {
    /// Ingested table, before any preprocessing (raw histograms).
    pub raw: &'a Table,
    /// Post-trim table in original units (trimmed histograms).
    pub presentation: &'a Table,
    /// Numeric independent columns shown as histograms.
    pub trim_columns: &'a [String],
    pub correlation_labels: &'a [String],
    pub correlation: &'a Matrix,
    pub pca: &'a PcaModel,
    /// Scores over at least the first two components, row-aligned with the
    /// k-means assignments.
    pub scores: &'a Matrix,
    pub elbow: Option<&'a ElbowCurve>,
    pub kmeans: &'a KMeansModel,
    /// Points the model was fitted on (distances for nearest-row marks).
    pub cluster_points: &'a Matrix,
    pub nearest_m: usize,
    pub bins: usize,
}

/// Emit all figures into `dir`; returns the emitted file names.
pub fn emit_report(input: &ReportInput, dir: &Path) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<String> = Vec::new();
    let mut fig = 0usize;

    // histograms of the numeric independents, raw then trimmed
    for (table, tag) in [(input.raw, "raw"), (input.presentation, "trimmed")] {
        for name in input.trim_columns {
            let Ok(col) = table.column(name) else {
                continue;
            };
            let values = col.present_numeric().map_err(CliError::from)?;
            if values.is_empty() {
                continue;
            }
            fig += 1;
            let stem = format!("fig{fig}_hist_{tag}_{name}");
            let spec = ChartSpec::new(
                &format!("{name} ({tag})"),
                ChartData::Histogram {
                    values: values.clone(),
                    bins: input.bins,
                },
            )
            .with_axis_labels(name, "count");
            write_svg(dir, &stem, &spec, &mut files)?;
            write_csv_rows(
                dir,
                &stem,
                &["bin_lo", "bin_hi", "count"],
                histogram_rows(&values, input.bins)?,
                &mut files,
            )?;
        }
    }

    // correlation heatmap
    fig += 1;
    let stem = format!("fig{fig}_correlation");
    let spec = ChartSpec::new(
        "correlation matrix",
        ChartData::Heatmap {
            labels: input.correlation_labels.to_vec(),
            cells: input.correlation.data().to_vec(),
        },
    );
    write_svg(dir, &stem, &spec, &mut files)?;
    let mut corr_rows = Vec::new();
    for i in 0..input.correlation.rows() {
        for j in 0..input.correlation.cols() {
            corr_rows.push(vec![
                input.correlation_labels[i].clone(),
                input.correlation_labels[j].clone(),
                format!("{}", input.correlation.get(i, j)),
            ]);
        }
    }
    write_csv_rows(dir, &stem, &["row", "col", "r"], corr_rows, &mut files)?;

    // PCA biplot: first-two-component scores plus loading arrows
    let two_dimensional = input.pca.n_features() >= 2 && input.scores.cols() >= 2;
    if two_dimensional {
        fig += 1;
        let stem = format!("fig{fig}_pca_biplot");
        let arrows = biplot_loadings(input.pca);
        let arrow_tuples: Vec<(String, f64, f64)> = input
            .pca
            .feature_names
            .iter()
            .enumerate()
            .map(|(f, name)| (name.clone(), arrows.get(f, 0), arrows.get(f, 1)))
            .collect();
        let xs: Vec<f64> = (0..input.scores.rows())
            .map(|i| input.scores.get(i, 0))
            .collect();
        let ys: Vec<f64> = (0..input.scores.rows())
            .map(|i| input.scores.get(i, 1))
            .collect();
        let spec = ChartSpec::new(
            "first two components",
            ChartData::Biplot {
                xs: xs.clone(),
                ys: ys.clone(),
                arrows: arrow_tuples.clone(),
            },
        )
        .with_axis_labels("pc1", "pc2");
        write_svg(dir, &stem, &spec, &mut files)?;
        let mut rows: Vec<Vec<String>> = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| vec!["score".to_string(), format!("{x}"), format!("{y}")])
            .collect();
        for (name, ax, ay) in &arrow_tuples {
            rows.push(vec![
                format!("loading:{name}"),
                format!("{ax}"),
                format!("{ay}"),
            ]);
        }
        write_csv_rows(dir, &stem, &["kind", "x", "y"], rows, &mut files)?;
    }

    // variance ratios
    fig += 1;
    let stem = format!("fig{fig}_variance_ratio");
    let labels: Vec<String> = (1..=input.pca.n_features())
        .map(|i| format!("pc{i}"))
        .collect();
    let spec = ChartSpec::new(
        "explained variance ratio",
        ChartData::Bar {
            labels: labels.clone(),
            values: input.pca.explained_variance_ratio.clone(),
        },
    )
    .with_axis_labels("component", "ratio");
    write_svg(dir, &stem, &spec, &mut files)?;
    let rows = labels
        .iter()
        .zip(&input.pca.explained_variance_ratio)
        .map(|(l, r)| vec![l.clone(), format!("{r}")])
        .collect();
    write_csv_rows(dir, &stem, &["component", "ratio"], rows, &mut files)?;

    // elbow curve (auto-k runs only)
    if let Some(elbow) = input.elbow {
        fig += 1;
        let stem = format!("fig{fig}_elbow");
        let spec = ChartSpec::new(
            &format!("elbow: chosen k = {}", elbow.chosen_k),
            ChartData::Line {
                series: vec![XySeries::new(
                    "inertia",
                    elbow.ks.iter().map(|&k| k as f64).collect(),
                    elbow.inertias.clone(),
                )],
            },
        )
        .with_axis_labels("k", "inertia");
        write_svg(dir, &stem, &spec, &mut files)?;
        let rows = elbow
            .ks
            .iter()
            .zip(&elbow.inertias)
            .map(|(k, i)| vec![k.to_string(), format!("{i}")])
            .collect();
        write_csv_rows(dir, &stem, &["k", "inertia"], rows, &mut files)?;
    }

    // cluster scatter with the m nearest rows per cluster marked
    if !two_dimensional {
        files.sort();
        write_hash_manifest(dir, &mut files)?;
        return Ok(files);
    }
    fig += 1;
    let stem = format!("fig{fig}_clusters");
    let mut series = Vec::new();
    let mut nearest_flags = vec![false; input.scores.rows()];
    for cluster in 0..input.kmeans.k {
        let members: Vec<usize> = input
            .kmeans
            .assignments
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == cluster)
            .map(|(i, _)| i)
            .collect();
        series.push(XySeries::new(
            &format!("cluster {cluster}"),
            members.iter().map(|&i| input.scores.get(i, 0)).collect(),
            members.iter().map(|&i| input.scores.get(i, 1)).collect(),
        ));
        let m = input.nearest_m.min(members.len());
        if m > 0 {
            let nearest = nearest_to_centroid(input.kmeans, input.cluster_points, cluster, m)
                .map_err(CliError::from)?;
            for &i in &nearest {
                nearest_flags[i] = true;
            }
            series.push(
                XySeries::new(
                    &format!("cluster {cluster} nearest"),
                    nearest.iter().map(|&i| input.scores.get(i, 0)).collect(),
                    nearest.iter().map(|&i| input.scores.get(i, 1)).collect(),
                )
                .highlighted(),
            );
        }
    }
    let spec = ChartSpec::new(
        "clusters on the first two components",
        ChartData::Scatter { series },
    )
    .with_axis_labels("pc1", "pc2");
    write_svg(dir, &stem, &spec, &mut files)?;
    let rows = (0..input.scores.rows())
        .map(|i| {
            vec![
                format!("{}", input.scores.get(i, 0)),
                format!("{}", input.scores.get(i, 1)),
                input.kmeans.assignments[i].to_string(),
                (nearest_flags[i] as u8).to_string(),
            ]
        })
        .collect();
    write_csv_rows(
        dir,
        &stem,
        &["pc1", "pc2", "cluster", "nearest"],
        rows,
        &mut files,
    )?;

    // pairplot over the clustered score dimensions
    fig += 1;
    let stem = format!("fig{fig}_pairplot");
    let q = input.scores.cols();
    let dim_names: Vec<String> = (1..=q).map(|i| format!("pc{i}")).collect();
    let score_rows: Vec<Vec<f64>> = (0..input.scores.rows())
        .map(|i| input.scores.row(i).to_vec())
        .collect();
    let spec = ChartSpec::new(
        "components pairplot",
        ChartData::Pairplot {
            dim_names: dim_names.clone(),
            rows: score_rows.clone(),
            groups: input.kmeans.assignments.clone(),
            highlight: Vec::new(),
            bins: input.bins.min(20),
        },
    );
    write_svg(dir, &stem, &spec, &mut files)?;
    let mut header: Vec<&str> = dim_names.iter().map(String::as_str).collect();
    header.push("cluster");
    let rows = score_rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            r.push(input.kmeans.assignments[i].to_string());
            r
        })
        .collect();
    write_csv_rows(dir, &stem, &header, rows, &mut files)?;

    files.sort();
    write_hash_manifest(dir, &mut files)?;
    Ok(files)
}

/// Content-hash manifest over every emitted file.
fn write_hash_manifest(dir: &Path, files: &mut Vec<String>) -> Result<(), CliError> {
    let mut manifest = String::new();
    for file in files.iter() {
        let digest = sha256_file(&dir.join(file))?;
        manifest.push_str(&format!("sha256 {digest}  {file}\n"));
    }
    fs::write(dir.join("manifest.txt"), manifest)
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    files.push("manifest.txt".to_string());
    files.sort();
    Ok(())
}

fn histogram_rows(values: &[f64], bins: usize) -> Result<Vec<Vec<String>>, CliError> {
    let (edges, counts) =
        tabkit_core::chart::histogram_bins(values, bins).map_err(CliError::from)?;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            vec![
                format!("{}", edges[i]),
                format!("{}", edges[i + 1]),
                c.to_string(),
            ]
        })
        .collect())
}

fn write_svg(
    dir: &Path,
    stem: &str,
    spec: &ChartSpec,
    files: &mut Vec<String>,
) -> Result<(), CliError> {
    let svg = render_chart(spec).map_err(CliError::from)?;
    let name = format!("{stem}.svg");
    fs::write(dir.join(&name), svg)
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    files.push(name);
    Ok(())
}

fn write_csv_rows(
    dir: &Path,
    stem: &str,
    header: &[&str],
    rows: Vec<Vec<String>>,
    files: &mut Vec<String>,
) -> Result<(), CliError> {
    let name = format!("{stem}.csv");
    let path = dir.join(&name);
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    writer
        .write_record(header)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for row in rows {
        writer
            .write_record(&row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Data(e.to_string()))?;
    files.push(name);
    Ok(())
}
