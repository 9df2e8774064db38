//! CSV ingestion and artifact file formats.
//!
//! Dialect: comma separator, double-quote quoting, UTF-8, first row is the
//! header, an empty field is a missing cell. Present numeric cells are
//! written with Rust's shortest round-trip float formatting, so
//! write-then-load reproduces them bit-exactly.

use std::fs;
use std::path::Path;

use tabkit_core::error::Error;
use tabkit_core::matrix::Matrix;
use tabkit_core::stats::ColumnStats;
use tabkit_core::table::{Column, ColumnKind, Role, Table};

use crate::CliError;

/// Declared schema: (name, kind, role) per column, in file order.
pub type Schema = Vec<(String, ColumnKind, Role)>;

/// Read a schema file (`name,kind,role` with a header row).
pub fn load_schema(path: &Path) -> Result<Schema, CliError> {
    let mut reader = open_reader(path)?;
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(data_error(format!("{}: empty schema file", path.display()))),
    };
    let expect = ["name", "kind", "role"];
    for (i, want) in expect.iter().enumerate() {
        if header.get(i).map(str::trim) != Some(*want) {
            return Err(data_error(format!(
                "{}: schema header must be `name,kind,role`",
                path.display()
            )));
        }
    }
    let mut schema = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let name = record
            .get(0)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| data_error(format!("{}: schema row lacks a name", path.display())))?;
        let kind = ColumnKind::parse(record.get(1).unwrap_or_default()).map_err(CliError::from)?;
        let role = Role::parse(record.get(2).unwrap_or_default()).map_err(CliError::from)?;
        schema.push((name.to_string(), kind, role));
    }
    if schema.is_empty() {
        return Err(data_error(format!(
            "{}: schema declares no columns",
            path.display()
        )));
    }
    Ok(schema)
}

/// Write a schema file describing `table`.
pub fn write_schema(table: &Table, path: &Path) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    writer
        .write_record(["name", "kind", "role"])
        .map_err(|e| csv_error(path, e))?;
    for col in table.columns() {
        writer
            .write_record([col.name(), col.kind().as_str(), col.role().as_str()])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Load a data CSV against an explicit schema.
///
/// The header row must match the schema names exactly and in order.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<Table, CliError> {
    let mut reader = open_reader(path)?;
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(data_error(format!("{}: empty file", path.display()))),
    };
    if header.len() != schema.len() {
        return Err(CliError::from(Error::Schema(format!(
            "header has {} columns, schema declares {}",
            header.len(),
            schema.len()
        ))));
    }
    for (i, (name, _, _)) in schema.iter().enumerate() {
        let got = header.get(i).unwrap_or_default().trim();
        if got != name {
            return Err(CliError::from(Error::Schema(format!(
                "header column {} is `{got}`, schema expects `{name}`",
                i + 1
            ))));
        }
    }

    let mut numeric: Vec<Vec<Option<f64>>> = schema.iter().map(|_| Vec::new()).collect();
    let mut text: Vec<Vec<Option<String>>> = schema.iter().map(|_| Vec::new()).collect();
    for (row_idx, record) in records.enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != schema.len() {
            return Err(CliError::from(Error::Parse {
                row: row_idx + 1,
                column: String::new(),
                message: format!("row has {} fields, expected {}", record.len(), schema.len()),
            }));
        }
        for (c, (name, kind, _)) in schema.iter().enumerate() {
            let raw = record.get(c).unwrap_or_default().trim();
            match kind {
                ColumnKind::Numeric => {
                    if raw.is_empty() {
                        numeric[c].push(None);
                    } else {
                        let value: f64 = raw.parse().map_err(|_| {
                            CliError::from(Error::Parse {
                                row: row_idx + 1,
                                column: name.clone(),
                                message: format!("`{raw}` is not a number"),
                            })
                        })?;
                        if !value.is_finite() {
                            return Err(CliError::from(Error::Parse {
                                row: row_idx + 1,
                                column: name.clone(),
                                message: format!("`{raw}` is not finite"),
                            }));
                        }
                        numeric[c].push(Some(value));
                    }
                }
                _ => {
                    if raw.is_empty() {
                        text[c].push(None);
                    } else {
                        text[c].push(Some(raw.to_string()));
                    }
                }
            }
        }
    }

    let mut columns = Vec::with_capacity(schema.len());
    for (c, (name, kind, role)) in schema.iter().enumerate() {
        let column = match kind {
            ColumnKind::Numeric => Column::numeric(name, *role, std::mem::take(&mut numeric[c]))
                .map_err(CliError::from)?,
            ColumnKind::Categorical => {
                Column::categorical(name, *role, std::mem::take(&mut text[c]))
            }
            ColumnKind::Identifier => Column::identifier(name, std::mem::take(&mut text[c])),
        };
        columns.push(column);
    }
    Table::new(columns).map_err(CliError::from)
}

/// Write a table; missing cells become empty fields.
pub fn write_csv(table: &Table, path: &Path) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    let names: Vec<&str> = table.columns().iter().map(Column::name).collect();
    writer
        .write_record(&names)
        .map_err(|e| csv_error(path, e))?;
    for row in 0..table.row_count() {
        let mut record: Vec<String> = Vec::with_capacity(names.len());
        for col in table.columns() {
            let cell = match col.numeric_values() {
                Ok(values) => values[row].map(|v| format!("{v}")).unwrap_or_default(),
                Err(_) => col.text_values().map_err(CliError::from)?[row]
                    .clone()
                    .unwrap_or_default(),
            };
            record.push(cell);
        }
        writer
            .write_record(&record)
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Load a table with its sidecar schema (`<stem>.schema.csv` next to it).
pub fn load_with_sidecar(path: &Path, schema: Option<&Path>) -> Result<Table, CliError> {
    let sidecar = sidecar_schema_path(path);
    let schema_path = match schema {
        Some(p) => p.to_path_buf(),
        None if sidecar.exists() => sidecar,
        None => {
            return Err(CliError::Config(format!(
                "no --schema given and {} does not exist",
                sidecar.display()
            )))
        }
    };
    let schema = load_schema(&schema_path)?;
    load_csv(path, &schema)
}

pub fn sidecar_schema_path(path: &Path) -> std::path::PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.schema.csv"))
}

/// Column statistics export, one row per column.
pub fn write_stats_csv(stats: &[ColumnStats], path: &Path) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    writer
        .write_record([
            "name",
            "count_present",
            "mean",
            "std_sample",
            "min",
            "max",
            "skewness_population",
            "skewness_sample",
            "kurtosis_population",
            "kurtosis_excess_sample",
        ])
        .map_err(|e| csv_error(path, e))?;
    for s in stats {
        writer
            .write_record([
                s.name.clone(),
                s.count_present.to_string(),
                format!("{}", s.mean),
                format!("{}", s.std_sample),
                format!("{}", s.min),
                format!("{}", s.max),
                format!("{}", s.skewness_population),
                s.skewness_sample
                    .map(|v| format!("{v}"))
                    .unwrap_or_default(),
                format!("{}", s.kurtosis_population),
                s.kurtosis_excess_sample
                    .map(|v| format!("{v}"))
                    .unwrap_or_default(),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Two-column elbow export.
pub fn write_elbow_csv(ks: &[usize], inertias: &[f64], path: &Path) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    writer
        .write_record(["k", "inertia"])
        .map_err(|e| csv_error(path, e))?;
    for (k, inertia) in ks.iter().zip(inertias) {
        writer
            .write_record([k.to_string(), format!("{inertia}")])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// `(row_id, cluster)` assignment export.
pub fn write_assignments_csv(
    row_ids: &[String],
    assignments: &[usize],
    path: &Path,
) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    writer
        .write_record(["row_id", "cluster"])
        .map_err(|e| csv_error(path, e))?;
    for (id, cluster) in row_ids.iter().zip(assignments) {
        writer
            .write_record([id.clone(), cluster.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Matrix export with a row id column and named value columns.
pub fn write_matrix_csv(
    row_ids: &[String],
    matrix: &Matrix,
    value_names: &[String],
    path: &Path,
) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    let mut header = vec!["row_id".to_string()];
    header.extend_from_slice(value_names);
    writer
        .write_record(&header)
        .map_err(|e| csv_error(path, e))?;
    for (i, id) in row_ids.iter().enumerate() {
        let mut record = vec![id.clone()];
        for j in 0..matrix.cols() {
            record.push(format!("{}", matrix.get(i, j)));
        }
        writer
            .write_record(&record)
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Read a matrix written by [`write_matrix_csv`]: returns ids and values.
pub fn load_matrix_csv(path: &Path) -> Result<(Vec<String>, Matrix, Vec<String>), CliError> {
    let mut reader = open_reader(path)?;
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(data_error(format!("{}: empty file", path.display()))),
    };
    if header.len() < 2 || header.get(0) != Some("row_id") {
        return Err(data_error(format!(
            "{}: expected a `row_id` column followed by value columns",
            path.display()
        )));
    }
    let value_names: Vec<String> = (1..header.len())
        .map(|i| header.get(i).unwrap_or_default().to_string())
        .collect();
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (row_idx, record) in records.enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        ids.push(record.get(0).unwrap_or_default().to_string());
        for c in 1..header.len() {
            let raw = record.get(c).unwrap_or_default().trim();
            let v: f64 = raw.parse().map_err(|_| {
                CliError::from(Error::Parse {
                    row: row_idx + 1,
                    column: value_names[c - 1].clone(),
                    message: format!("`{raw}` is not a number"),
                })
            })?;
            data.push(v);
        }
    }
    let matrix = Matrix::from_vec(ids.len(), value_names.len(), data).map_err(CliError::from)?;
    Ok((ids, matrix, value_names))
}

/// Square matrix export with shared row/column labels (correlation tables).
pub fn write_labeled_matrix_csv(
    labels: &[String],
    matrix: &Matrix,
    path: &Path,
) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    let mut header = vec![String::new()];
    header.extend_from_slice(labels);
    writer
        .write_record(&header)
        .map_err(|e| csv_error(path, e))?;
    for (i, label) in labels.iter().enumerate() {
        let mut record = vec![label.clone()];
        for j in 0..matrix.cols() {
            record.push(format!("{}", matrix.get(i, j)));
        }
        writer
            .write_record(&record)
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Planted-label sidecar for synthetic data.
pub fn write_labels_csv(row_ids: &[String], labels: &[usize], path: &Path) -> Result<(), CliError> {
    let mut writer = open_writer(path)?;
    writer
        .write_record(["row_id", "label"])
        .map_err(|e| csv_error(path, e))?;
    for (id, label) in row_ids.iter().zip(labels) {
        writer
            .write_record([id.clone(), label.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

/// Read `(row_id, value)` pairs from a two-column CSV with a header.
pub fn load_two_column_csv(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut reader = open_reader(path)?;
    let mut records = reader.records();
    let _header = records.next().transpose().map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        out.push((
            record.get(0).unwrap_or_default().to_string(),
            record.get(1).unwrap_or_default().to_string(),
        ));
    }
    Ok(out)
}

/// First numeric column of a CSV (header skipped); for the metrics command.
pub fn load_vector_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut reader = open_reader(path)?;
    let mut records = reader.records();
    let _header = records.next().transpose().map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (row_idx, record) in records.enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let raw = record.get(0).unwrap_or_default().trim();
        let v: f64 = raw.parse().map_err(|_| {
            CliError::from(Error::Parse {
                row: row_idx + 1,
                column: "value".to_string(),
                message: format!("`{raw}` is not a number"),
            })
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Row identifiers: the table's identifier column when it has exactly one,
/// otherwise synthesized row indices.
pub fn row_ids(table: &Table) -> Vec<String> {
    let id_cols: Vec<&Column> = table
        .columns()
        .iter()
        .filter(|c| c.kind() == ColumnKind::Identifier)
        .collect();
    if id_cols.len() == 1 {
        if let Ok(values) = id_cols[0].text_values() {
            return values
                .iter()
                .enumerate()
                .map(|(i, v)| v.clone().unwrap_or_else(|| format!("row{i}")))
                .collect();
        }
    }
    (0..table.row_count()).map(|i| format!("row{i}")).collect()
}

fn open_reader(path: &Path) -> Result<csv::Reader<fs::File>, CliError> {
    let file = fs::File::open(path).map_err(io_error(path))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file))
}

fn open_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_error(path))?;
        }
    }
    let file = fs::File::create(path).map_err(io_error(path))?;
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn data_error(message: String) -> CliError {
    CliError::Data(message)
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}
