use std::path::Path;

use relspec_core::{Architecture, DDModel, Matrix};
use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::AppError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureDoc {
    pub input_dim: usize,
    pub layer_widths: Vec<usize>,
    pub residual_flags: Vec<bool>,
}

/// A trained model plus the names it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub format_version: u32,
    pub architecture: ArchitectureDoc,
    /// One row-major `rows × cols` array per layer.
    pub weights: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_names: Option<Vec<String>>,
}

impl ModelDoc {
    pub fn from_model(
        model: &DDModel,
        variable_names: Option<Vec<String>>,
        output_names: Option<Vec<String>>,
    ) -> Self {
        let arch = model.architecture();
        Self {
            format_version: FORMAT_VERSION,
            architecture: ArchitectureDoc {
                input_dim: arch.input_dim(),
                layer_widths: arch.layer_widths().to_vec(),
                residual_flags: arch.residual_flags().to_vec(),
            },
            weights: model.weights().iter().map(Matrix::to_rows).collect(),
            variable_names,
            output_names,
        }
    }

    pub fn to_model(&self) -> Result<DDModel, AppError> {
        if self.format_version != FORMAT_VERSION {
            return Err(AppError::data(format!(
                "unsupported model format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let a = &self.architecture;
        let arch = Architecture::new(
            a.input_dim,
            a.layer_widths.clone(),
            a.residual_flags.clone(),
        )?;
        let weights = self
            .weights
            .iter()
            .map(|rows| {
                if rows.is_empty() {
                    return Err(AppError::data("empty weight matrix"));
                }
                Matrix::from_rows(rows).map_err(AppError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let model = DDModel::new(arch, weights)?;
        if let Some(v) = &self.variable_names {
            if v.len() + 1 != model.architecture().input_dim() {
                return Err(AppError::data(format!(
                    "{} variable names for input_dim {}",
                    v.len(),
                    model.architecture().input_dim()
                )));
            }
        }
        if let Some(o) = &self.output_names {
            if o.len() != model.architecture().output_dim() {
                return Err(AppError::data(format!(
                    "{} output names for {} outputs",
                    o.len(),
                    model.architecture().output_dim()
                )));
            }
        }
        Ok(model)
    }
}

pub fn write_model(path: &Path, doc: &ModelDoc) -> Result<(), AppError> {
    write_json(path, doc)
}

pub fn read_model(path: &Path) -> Result<(DDModel, ModelDoc), AppError> {
    let doc: ModelDoc = read_json(path)?;
    let model = doc.to_model()?;
    Ok((model, doc))
}
