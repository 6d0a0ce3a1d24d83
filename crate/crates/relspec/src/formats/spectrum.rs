use std::path::Path;

use relspec_core::{spectrum::TruncationReport, Monomial, RelationSpectrum, SparsePoly};
use serde::{Deserialize, Serialize};

use super::{csv_text, read_json, write_json, write_text};
use crate::{json::fmt_f64, AppError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemDoc {
    pub position: usize,
    pub label: String,
    pub monomial: Vec<u16>,
    /// Degree above two: outside the fixed quadratic table.
    pub extended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub position: usize,
    pub monomial: Vec<u16>,
    pub label: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub name: String,
    pub items: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationDoc {
    pub max_degree: u32,
    pub dropped_abs_mass: Vec<f64>,
}

/// Spectrum file: the item table plus the nonzero coefficients of each
/// output. Monomial exponents index `variables`; `display_order` fixes the
/// item positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDoc {
    pub variables: Vec<String>,
    pub display_order: Vec<String>,
    pub items: Vec<ItemDoc>,
    pub outputs: Vec<OutputDoc>,
    #[serde(default)]
    pub truncation: Option<TruncationDoc>,
}

impl SpectrumDoc {
    pub fn from_spectrum(s: &RelationSpectrum) -> Self {
        let labels = s.labels();
        let items = s
            .items()
            .iter()
            .enumerate()
            .map(|(i, item)| ItemDoc {
                position: i + 1,
                label: labels[i].clone(),
                monomial: item.monomial.exponents().to_vec(),
                extended: item.extended,
            })
            .collect();
        let outputs = s
            .output_names()
            .iter()
            .zip(s.outputs())
            .map(|(name, entries)| OutputDoc {
                name: name.clone(),
                items: entries
                    .iter()
                    .map(|e| EntryDoc {
                        position: e.position,
                        monomial: s.items()[e.position - 1].monomial.exponents().to_vec(),
                        label: labels[e.position - 1].clone(),
                        coefficient: e.coefficient,
                    })
                    .collect(),
            })
            .collect();
        Self {
            variables: s.variable_names().to_vec(),
            display_order: s
                .display_order()
                .iter()
                .map(|&i| s.variable_names()[i].clone())
                .collect(),
            items,
            outputs,
            truncation: s.truncation().map(|t| TruncationDoc {
                max_degree: t.max_degree,
                dropped_abs_mass: t.dropped_abs_mass.clone(),
            }),
        }
    }

    /// Rebuilds the spectrum from the monomials and checks that the stored
    /// positions agree with the rebuilt layout.
    pub fn to_spectrum(&self) -> Result<RelationSpectrum, AppError> {
        let nvars = self.variables.len();
        let order = self
            .display_order
            .iter()
            .map(|name| {
                self.variables
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| {
                        AppError::data(format!("display_order names unknown variable {name:?}"))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let polys = self
            .outputs
            .iter()
            .map(|o| {
                o.items
                    .iter()
                    .map(|e| {
                        if e.monomial.len() != nvars {
                            return Err(AppError::data(format!(
                                "output {:?}: monomial with {} exponents over {nvars} variables",
                                o.name,
                                e.monomial.len()
                            )));
                        }
                        if !e.coefficient.is_finite() {
                            return Err(AppError::data(format!(
                                "output {:?}: non-finite coefficient",
                                o.name
                            )));
                        }
                        Ok((Monomial::new(e.monomial.clone()), e.coefficient))
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(|terms| SparsePoly::from_terms(nvars, terms))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let names: Vec<String> = self.outputs.iter().map(|o| o.name.clone()).collect();
        let spectrum = match &self.truncation {
            None => RelationSpectrum::from_polys(self.variables.clone(), names, &polys, order)?,
            Some(t) => RelationSpectrum::from_truncated_polys(
                self.variables.clone(),
                names,
                &polys,
                order,
                TruncationReport {
                    max_degree: t.max_degree,
                    dropped_abs_mass: t.dropped_abs_mass.clone(),
                },
            )?,
        };
        for (o, entries) in self.outputs.iter().zip(spectrum.outputs()) {
            let stored: Vec<usize> = o.items.iter().map(|e| e.position).collect();
            let rebuilt: Vec<usize> = entries.iter().map(|e| e.position).collect();
            if stored != rebuilt {
                return Err(AppError::data(format!(
                    "output {:?}: item positions do not match the display order",
                    o.name
                )));
            }
        }
        Ok(spectrum)
    }
}

pub fn write_spectrum_json(path: &Path, s: &RelationSpectrum) -> Result<(), AppError> {
    write_json(path, &SpectrumDoc::from_spectrum(s))
}

pub fn read_spectrum_json(path: &Path) -> Result<RelationSpectrum, AppError> {
    read_json::<SpectrumDoc>(path)?.to_spectrum()
}

/// `position,label,<one coefficient column per output>`, one row per item,
/// zeros included.
pub fn spectrum_csv(s: &RelationSpectrum) -> String {
    let mut header = vec!["position".to_string(), "label".to_string()];
    header.extend(s.output_names().iter().cloned());
    let columns: Vec<Vec<f64>> = (0..s.output_names().len())
        .map(|o| s.coefficient_vector(o))
        .collect();
    let rows = s.labels().into_iter().enumerate().map(|(i, label)| {
        let mut row = vec![(i + 1).to_string(), label];
        row.extend(columns.iter().map(|c| fmt_f64(c[i])));
        row
    });
    csv_text(&header, rows)
}

/// `position,label,degree` for every item.
pub fn item_table_csv(s: &RelationSpectrum) -> String {
    let header = ["position", "label", "degree"].map(String::from);
    let rows = s
        .labels()
        .into_iter()
        .zip(s.items())
        .enumerate()
        .map(|(i, (label, item))| {
            vec![
                (i + 1).to_string(),
                label,
                item.monomial.degree().to_string(),
            ]
        });
    csv_text(&header, rows)
}

pub fn write_spectrum_csv(path: &Path, s: &RelationSpectrum) -> Result<(), AppError> {
    write_text(path, &spectrum_csv(s))
}

pub fn write_item_table(path: &Path, s: &RelationSpectrum) -> Result<(), AppError> {
    write_text(path, &item_table_csv(s))
}
