//! Report tables: loss traces, cross-validation results, synergy reports
//! and coupling matrices.

use relspec_core::{
    analysis::{Aggregation, CouplingMatrix, SynergyEntry},
    cv::CvResult,
    stats::TTestOutcome,
};
use serde::Serialize;

use super::csv_text;
use crate::json::fmt_f64;

/// `epoch,loss`, epochs numbered from 1.
pub fn loss_trace_csv(trace: &[f64]) -> String {
    let header = ["epoch", "loss"].map(String::from);
    csv_text(
        &header,
        trace
            .iter()
            .enumerate()
            .map(|(i, &l)| vec![(i + 1).to_string(), fmt_f64(l)]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelCvDoc {
    pub model: String,
    /// `[fold][output]`
    pub fold_r2: Vec<Vec<f64>>,
    pub fold_mse: Vec<Vec<f64>>,
    pub r2_mean: Vec<f64>,
    pub r2_sd: Vec<f64>,
    pub mse_mean: Vec<f64>,
    pub mse_sd: Vec<f64>,
}

impl From<&CvResult> for ModelCvDoc {
    fn from(r: &CvResult) -> Self {
        Self {
            model: r.model.to_string(),
            fold_r2: r.fold_r2.clone(),
            fold_mse: r.fold_mse.clone(),
            r2_mean: r.r2_mean.clone(),
            r2_sd: r.r2_sd.clone(),
            mse_mean: r.mse_mean.clone(),
            mse_sd: r.mse_sd.clone(),
        }
    }
}

/// Paired t-test of per-fold R² for one output, model against the LR
/// baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonDoc {
    pub output: String,
    pub model: String,
    pub baseline: String,
    /// `false` when every fold difference is identical and no statistic
    /// exists.
    pub defined: bool,
    pub t: Option<f64>,
    pub df: Option<usize>,
    pub p_value: Option<f64>,
    pub mean_difference: Option<f64>,
}

impl ComparisonDoc {
    pub fn new(output: &str, model: &str, baseline: &str, outcome: &TTestOutcome) -> Self {
        let (t, df, p, diff) = match *outcome {
            TTestOutcome::Statistic { t, p_value, df } => (Some(t), Some(df), Some(p_value), None),
            TTestOutcome::Degenerate { mean_difference } => {
                (None, None, None, Some(mean_difference))
            }
        };
        Self {
            output: output.to_string(),
            model: model.to_string(),
            baseline: baseline.to_string(),
            defined: t.is_some(),
            t,
            df,
            p_value: p,
            mean_difference: diff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub k: usize,
    pub scheme: String,
    pub outputs: Vec<String>,
    /// Test fold (0-based) of every dataset row.
    pub fold_assignment: Vec<usize>,
    pub models: Vec<ModelCvDoc>,
    pub comparisons: Vec<ComparisonDoc>,
}

/// `output,model,fold,R2,MSE`, folds numbered from 1.
pub fn cv_folds_csv(outputs: &[String], results: &[CvResult]) -> String {
    let header = ["output", "model", "fold", "R2", "MSE"].map(String::from);
    let mut rows = Vec::new();
    for (o, name) in outputs.iter().enumerate() {
        for r in results {
            for (f, (r2, ms)) in r.fold_r2.iter().zip(&r.fold_mse).enumerate() {
                rows.push(vec![
                    name.clone(),
                    r.model.to_string(),
                    (f + 1).to_string(),
                    fmt_f64(r2[o]),
                    fmt_f64(ms[o]),
                ]);
            }
        }
    }
    csv_text(&header, rows)
}

/// `output,model,R2_mean,R2_sd,MSE_mean,MSE_sd,p_value_vs_baseline`. The
/// baseline's own p-value cell is empty; an undefined test reads
/// `degenerate`.
pub fn cv_summary_csv(
    outputs: &[String],
    results: &[CvResult],
    comparisons: &[ComparisonDoc],
) -> String {
    let header = [
        "output",
        "model",
        "R2_mean",
        "R2_sd",
        "MSE_mean",
        "MSE_sd",
        "p_value_vs_baseline",
    ]
    .map(String::from);
    let mut rows = Vec::new();
    for (o, name) in outputs.iter().enumerate() {
        for r in results {
            let p = comparisons
                .iter()
                .find(|c| c.output == *name && c.model == r.model)
                .map_or(String::new(), |c| {
                    c.p_value.map_or("degenerate".into(), fmt_f64)
                });
            rows.push(vec![
                name.clone(),
                r.model.to_string(),
                fmt_f64(r.r2_mean[o]),
                fmt_f64(r.r2_sd[o]),
                fmt_f64(r.mse_mean[o]),
                fmt_f64(r.mse_sd[o]),
                p,
            ]);
        }
    }
    csv_text(&header, rows)
}

/// `finger,position,label,C_i,mean_coefficient,sign`; `C_i` in percent.
pub fn synergy_csv(fingers: &[String], entries: &[SynergyEntry]) -> String {
    let header = [
        "finger",
        "position",
        "label",
        "C_i",
        "mean_coefficient",
        "sign",
    ]
    .map(String::from);
    csv_text(
        &header,
        entries.iter().map(|e| {
            vec![
                fingers[e.finger].clone(),
                e.position.to_string(),
                e.label.clone(),
                fmt_f64(e.same_contribution),
                fmt_f64(e.mean_coefficient),
                e.sign.to_string(),
            ]
        }),
    )
}

/// Square table with a leading `finger` column; undefined entries read
/// `NA`.
pub fn coupling_csv(m: &CouplingMatrix) -> String {
    let mut header = vec!["finger".to_string()];
    header.extend(m.fingers.iter().cloned());
    csv_text(
        &header,
        m.fingers.iter().zip(&m.entries).map(|(name, row)| {
            let mut out = vec![name.clone()];
            out.extend(row.iter().map(|v| v.map_or("NA".into(), fmt_f64)));
            out
        }),
    )
}

pub fn aggregation_name(a: Aggregation) -> &'static str {
    match a {
        Aggregation::Concatenate => "concatenate",
        Aggregation::PerSubjectMean => "per_subject_mean",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingDoc {
    pub aggregation: String,
    pub fingers: Vec<String>,
    /// `null` marks an undefined correlation.
    pub matrix: Vec<Vec<Option<f64>>>,
}

impl From<&CouplingMatrix> for CouplingDoc {
    fn from(m: &CouplingMatrix) -> Self {
        Self {
            aggregation: aggregation_name(m.aggregation).to_string(),
            fingers: m.fingers.clone(),
            matrix: m.entries.clone(),
        }
    }
}
