use std::path::{Path, PathBuf};

use relspec_core::{Dataset, Matrix};
use serde::{Deserialize, Serialize};

use super::{csv_text, parse_cell, read_json, read_text, write_json, write_text};
use crate::{json::fmt_f64, AppError};

/// Sidecar of a dataset CSV: which columns are variables and which are
/// targets, and how the rows were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub variables: Vec<String>,
    pub targets: Vec<String>,
    pub rows: usize,
    /// Divisors applied to each variable column (1 when unscaled).
    #[serde(default)]
    pub variable_scales: Vec<f64>,
    #[serde(default)]
    pub target_scales: Vec<f64>,
    #[serde(default)]
    pub decimation: Option<usize>,
    #[serde(default)]
    pub sample_rate_hz: Option<f64>,
}

pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// `bias,<variables>,<targets>`.
pub fn dataset_csv(data: &Dataset) -> String {
    let mut header = vec!["bias".to_string()];
    header.extend(data.variable_names().iter().cloned());
    header.extend(data.target_names().iter().cloned());
    let rows = (0..data.len()).map(|i| {
        data.features()
            .row(i)
            .iter()
            .chain(data.targets().row(i))
            .map(|&v| fmt_f64(v))
            .collect()
    });
    csv_text(&header, rows)
}

pub fn write_dataset(
    csv_path: &Path,
    data: &Dataset,
    manifest: &DatasetManifest,
) -> Result<(), AppError> {
    write_text(csv_path, &dataset_csv(data))?;
    write_json(&manifest_path(csv_path), manifest)
}

pub fn parse_dataset(text: &str, manifest: &DatasetManifest) -> Result<Dataset, AppError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| AppError::data(format!("dataset header: {e}")))?;
    let expected: Vec<&str> = std::iter::once("bias")
        .chain(manifest.variables.iter().map(String::as_str))
        .chain(manifest.targets.iter().map(String::as_str))
        .collect();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(AppError::data(format!(
            "dataset header {found:?} does not match manifest columns {expected:?}"
        )));
    }
    let nf = 1 + manifest.variables.len();
    let nt = manifest.targets.len();
    let (mut features, mut targets) = (Vec::new(), Vec::new());
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| AppError::data(format!("dataset row {row}: {e}")))?;
        for (c, cell) in record.iter().enumerate() {
            let v = parse_cell(cell, || {
                format!("dataset row {row}, column {:?}", expected[c])
            })?;
            if c < nf {
                features.push(v);
            } else {
                targets.push(v);
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(AppError::data("dataset has no rows"));
    }
    if rows != manifest.rows {
        return Err(AppError::data(format!(
            "dataset has {rows} rows, manifest says {}",
            manifest.rows
        )));
    }
    Ok(Dataset::with_names(
        Matrix::from_vec(rows, nf, features)?,
        Matrix::from_vec(rows, nt, targets)?,
        manifest.variables.clone(),
        manifest.targets.clone(),
    )?)
}

pub fn read_dataset(csv_path: &Path) -> Result<(Dataset, DatasetManifest), AppError> {
    let manifest: DatasetManifest = read_json(&manifest_path(csv_path))?;
    let data = parse_dataset(&read_text(csv_path)?, &manifest).map_err(|e| match e {
        AppError::Data(msg) => AppError::Data(format!("{}: {msg}", csv_path.display())),
        other => other,
    })?;
    Ok((data, manifest))
}
