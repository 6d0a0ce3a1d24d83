use std::path::{Path, PathBuf};

use relspec_core::signal::{Channel, Recording};
use serde::{Deserialize, Serialize};

use super::{csv_text, parse_cell, read_json, read_text, write_json, write_text};
use crate::{json::fmt_f64, AppError};

/// Sidecar describing the columns of a recording CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingManifest {
    pub sample_rate_hz: f64,
    pub emg_channels: Vec<String>,
    pub force_channels: Vec<String>,
}

/// `recording.csv` → `recording.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn recording_csv(rec: &Recording) -> String {
    let mut header = vec!["time".to_string()];
    header.extend(rec.emg().iter().chain(rec.force()).map(|c| c.name.clone()));
    let rate = rec.sample_rate_hz();
    let rows = (0..rec.len()).map(|i| {
        let mut row = Vec::with_capacity(header.len());
        row.push(fmt_f64(i as f64 / rate));
        row.extend(
            rec.emg()
                .iter()
                .chain(rec.force())
                .map(|c| fmt_f64(c.samples[i])),
        );
        row
    });
    csv_text(&header, rows)
}

pub fn manifest_of(rec: &Recording) -> RecordingManifest {
    RecordingManifest {
        sample_rate_hz: rec.sample_rate_hz(),
        emg_channels: rec.emg().iter().map(|c| c.name.clone()).collect(),
        force_channels: rec.force().iter().map(|c| c.name.clone()).collect(),
    }
}

/// Writes the CSV and its manifest next to it.
pub fn write_recording(csv_path: &Path, rec: &Recording) -> Result<(), AppError> {
    write_text(csv_path, &recording_csv(rec))?;
    write_json(&manifest_path(csv_path), &manifest_of(rec))
}

/// Parses recording CSV text against a manifest. The header names the
/// manifest's EMG then force channels, optionally after a leading `time`
/// column (seconds, strictly increasing); without one, sampling is taken
/// as uniform at the manifest rate. Every cell must be a finite number.
pub fn parse_recording(text: &str, manifest: &RecordingManifest) -> Result<Recording, AppError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| AppError::data(format!("recording header: {e}")))?;
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(AppError::data("recording has no header"));
    }
    let has_time = header.get(0).map(str::trim) == Some("time");
    let expected: Vec<&str> = has_time
        .then_some("time")
        .into_iter()
        .chain(manifest.emg_channels.iter().map(String::as_str))
        .chain(manifest.force_channels.iter().map(String::as_str))
        .collect();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(AppError::data(format!(
            "recording header {found:?} does not match manifest columns {expected:?}"
        )));
    }

    let ncols = expected.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ncols];
    let mut last_time = f64::NEG_INFINITY;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => AppError::data(format!(
                "recording row {row}: {len} fields, header has {expected_len}"
            )),
            _ => AppError::data(format!("recording row {row}: {e}")),
        })?;
        for (c, cell) in record.iter().enumerate() {
            let v = parse_cell(cell, || {
                format!("recording row {row}, column {:?}", expected[c])
            })?;
            columns[c].push(v);
        }
        if has_time {
            let t = columns[0][r];
            if t <= last_time {
                return Err(AppError::data(format!(
                    "recording row {row}: time {t} does not increase"
                )));
            }
            last_time = t;
        }
    }
    if columns[0].is_empty() {
        return Err(AppError::data("recording has no data rows"));
    }

    let mut data = columns.into_iter().skip(usize::from(has_time));
    let emg = manifest
        .emg_channels
        .iter()
        .map(|n| Channel::new(n.clone(), data.next().expect("column count checked")))
        .collect();
    let force = manifest
        .force_channels
        .iter()
        .map(|n| Channel::new(n.clone(), data.next().expect("column count checked")))
        .collect();
    Ok(Recording::new(manifest.sample_rate_hz, emg, force)?)
}

/// Reads a recording; the manifest defaults to the CSV's sidecar.
pub fn read_recording(csv_path: &Path, manifest: Option<&Path>) -> Result<Recording, AppError> {
    let manifest_file = manifest.map_or_else(|| manifest_path(csv_path), Path::to_path_buf);
    let manifest: RecordingManifest = read_json(&manifest_file)?;
    parse_recording(&read_text(csv_path)?, &manifest).map_err(|e| match e {
        AppError::Data(msg) => AppError::Data(format!("{}: {msg}", csv_path.display())),
        other => other,
    })
}
