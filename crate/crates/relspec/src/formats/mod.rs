//! On-disk formats. Every float is written at 17 significant digits, so a
//! write/read cycle reproduces the exact bits.

pub mod dataset;
pub mod model;
pub mod recording;
pub mod report;
pub mod spectrum;

use std::{fs, path::Path};

use serde::{de::DeserializeOwned, Serialize};

use crate::{json, AppError};

pub fn read_text(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), AppError> {
    let text =
        json::to_string(value).map_err(|e| AppError::data(format!("{}: {e}", path.display())))?;
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, AppError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| AppError::data(format!("{}: {e}", path.display())))
}

/// Builds CSV text in memory; the writer only fails on I/O, which a `Vec`
/// never does.
pub(crate) fn csv_text(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

pub(crate) fn parse_cell(cell: &str, what: impl Fn() -> String) -> Result<f64, AppError> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| AppError::data(format!("{}: {cell:?} is not a number", what())))?;
    if !v.is_finite() {
        return Err(AppError::data(format!(
            "{}: non-finite value {cell:?}",
            what()
        )));
    }
    Ok(v)
}
