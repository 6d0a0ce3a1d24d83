//! Aligned feature/target tables.

use alloc::{format, string::String, vec::Vec};

use crate::{Error, Matrix, Result};

/// Feature matrix with a leading bias column of ones, plus the matching
/// targets. Row order is time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    targets: Matrix,
    variable_names: Vec<String>,
    target_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, targets: Matrix) -> Result<Self> {
        let variable_names = (1..features.cols()).map(|i| format!("x{i}")).collect();
        let target_names = (1..=targets.cols()).map(|i| format!("y{i}")).collect();
        Self::with_names(features, targets, variable_names, target_names)
    }

    pub fn with_names(
        features: Matrix,
        targets: Matrix,
        variable_names: Vec<String>,
        target_names: Vec<String>,
    ) -> Result<Self> {
        if features.rows() != targets.rows() {
            return Err(Error::DimensionMismatch {
                context: "dataset rows",
                expected: features.rows(),
                found: targets.rows(),
            });
        }
        if features.cols() < 2 {
            return Err(Error::InvalidParameter(
                "features need a bias column and at least one variable".into(),
            ));
        }
        if variable_names.len() + 1 != features.cols() {
            return Err(Error::DimensionMismatch {
                context: "variable names",
                expected: features.cols() - 1,
                found: variable_names.len(),
            });
        }
        if target_names.len() != targets.cols() {
            return Err(Error::DimensionMismatch {
                context: "target names",
                expected: targets.cols(),
                found: target_names.len(),
            });
        }
        for (i, row) in features.row_iter().enumerate() {
            if row[0] != 1.0 {
                return Err(Error::ContractViolation(format!(
                    "bias column must be 1 (row {i} has {})",
                    row[0]
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("feature row {i}")));
            }
        }
        for (i, row) in targets.row_iter().enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("target row {i}")));
            }
        }
        Ok(Self {
            features,
            targets,
            variable_names,
            target_names,
        })
    }

    /// Builds a dataset from raw variable rows, prepending the bias.
    pub fn from_variables(variables: &Matrix, targets: Matrix) -> Result<Self> {
        let mut features = Matrix::zeros(variables.rows(), variables.cols() + 1);
        for i in 0..variables.rows() {
            let row = features.row_mut(i);
            row[0] = 1.0;
            row[1..].copy_from_slice(variables.row(i));
        }
        Self::new(features, targets)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }

    /// Number of real variables, bias excluded.
    pub fn variable_count(&self) -> usize {
        self.features.cols() - 1
    }

    pub fn output_count(&self) -> usize {
        self.targets.cols()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn target_names(&self) -> &[String] {
        &self.target_names
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let pick = |m: &Matrix| {
            let mut out = Matrix::zeros(rows.len(), m.cols());
            for (dst, &src) in rows.iter().enumerate() {
                out.row_mut(dst).copy_from_slice(m.row(src));
            }
            out
        };
        Dataset {
            features: pick(&self.features),
            targets: pick(&self.targets),
            variable_names: self.variable_names.clone(),
            target_names: self.target_names.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bias_column_enforced() {
        let f = Matrix::from_rows(&[[1.0, 2.0], [0.5, 3.0]]).unwrap();
        let t = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            Dataset::new(f, t),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn row_count_mismatch() {
        let f = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let t = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            Dataset::new(f, t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn select_rows_keeps_alignment() {
        let v = Matrix::from_rows(&[[10.0], [20.0], [30.0]]).unwrap();
        let t = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        let d = Dataset::from_variables(&v, t).unwrap();
        let s = d.select_rows(&[2, 0]);
        assert_eq!(
            s.features().to_rows(),
            vec![vec![1.0, 30.0], vec![1.0, 10.0]]
        );
        assert_eq!(s.targets().column(0), vec![3.0, 1.0]);
    }
}
