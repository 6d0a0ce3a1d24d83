//! K-fold cross-validation of the linear baseline and of Dendrite Nets.

use alloc::{format, vec, vec::Vec};

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{
    dendrite::{init_model, train},
    linreg::fit_lr,
    metrics::{mean, mse, r_squared, sample_sd},
    Architecture, Dataset, Error, Matrix, Result, TrainConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldScheme {
    /// Consecutive blocks in time order.
    Contiguous,
    /// Rows shuffled with the given seed before blocking.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partitions `rows` into `k` test folds whose sizes differ by at most one;
/// the first `rows % k` folds take the extra row.
pub fn kfold(rows: usize, k: usize, scheme: FoldScheme) -> Result<Vec<Split>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if rows < k {
        return Err(Error::InsufficientRows { rows, folds: k });
    }
    let mut order: Vec<usize> = (0..rows).collect();
    if let FoldScheme::SeededRandom(seed) = scheme {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let (base, extra) = (rows / k, rows % k);
    let mut assignment = vec![0usize; rows];
    let mut start = 0;
    for fold in 0..k {
        let len = base + usize::from(fold < extra);
        for &r in &order[start..start + len] {
            assignment[r] = fold;
        }
        start += len;
    }
    Ok((0..k)
        .map(|fold| {
            let (test, train) = (0..rows).partition(|&r| assignment[r] == fold);
            Split { train, test }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    LinearRegression,
    Dendrite {
        architecture: Architecture,
        config: TrainConfig,
    },
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            Self::LinearRegression => "LR",
            Self::Dendrite { .. } => "DD",
        }
    }

    /// Fits on `train` and predicts `test.features()`.
    pub fn fit_predict(&self, train_data: &Dataset, test: &Dataset) -> Result<Matrix> {
        match self {
            Self::LinearRegression => fit_lr(train_data)?.predict(test.features()),
            Self::Dendrite {
                architecture,
                config,
            } => {
                let init = init_model(architecture, config.init_scale, config.rng_seed)?;
                let trained = train(&init, train_data, config)?;
                trained.model.predict(test.features())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub model: &'static str,
    pub k: usize,
    /// `[fold][output]`
    pub fold_r2: Vec<Vec<f64>>,
    pub fold_mse: Vec<Vec<f64>>,
    pub r2_mean: Vec<f64>,
    pub r2_sd: Vec<f64>,
    pub mse_mean: Vec<f64>,
    pub mse_sd: Vec<f64>,
    /// Test fold of every row.
    pub fold_assignment: Vec<usize>,
}

impl CvResult {
    /// Per-fold R² of one output.
    pub fn r2_of_output(&self, output: usize) -> Vec<f64> {
        self.fold_r2.iter().map(|f| f[output]).collect()
    }

    pub fn mse_of_output(&self, output: usize) -> Vec<f64> {
        self.fold_mse.iter().map(|f| f[output]).collect()
    }
}

pub fn cross_validate(
    data: &Dataset,
    k: usize,
    scheme: FoldScheme,
    spec: &ModelSpec,
) -> Result<CvResult> {
    let splits = kfold(data.len(), k, scheme)?;
    let outputs = data.output_count();
    let mut fold_r2 = Vec::with_capacity(k);
    let mut fold_mse = Vec::with_capacity(k);
    let mut fold_assignment = vec![0; data.len()];
    for (fold, split) in splits.iter().enumerate() {
        for &r in &split.test {
            fold_assignment[r] = fold;
        }
        let train_data = data.select_rows(&split.train);
        let test = data.select_rows(&split.test);
        let pred = spec.fit_predict(&train_data, &test)?;
        let mut r2 = Vec::with_capacity(outputs);
        let mut ms = Vec::with_capacity(outputs);
        for o in 0..outputs {
            let truth = test.targets().column(o);
            let guess = pred.column(o);
            r2.push(r_squared(&truth, &guess)?);
            ms.push(mse(&truth, &guess)?);
        }
        fold_r2.push(r2);
        fold_mse.push(ms);
    }
    let summarize = |table: &Vec<Vec<f64>>| -> (Vec<f64>, Vec<f64>) {
        (0..outputs)
            .map(|o| {
                let col: Vec<f64> = table.iter().map(|f| f[o]).collect();
                (mean(&col), sample_sd(&col))
            })
            .unzip()
    };
    let (r2_mean, r2_sd) = summarize(&fold_r2);
    let (mse_mean, mse_sd) = summarize(&fold_mse);
    Ok(CvResult {
        model: spec.label(),
        k,
        fold_r2,
        fold_mse,
        r2_mean,
        r2_sd,
        mse_mean,
        mse_sd,
        fold_assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_folds() {
        let s = kfold(10, 10, FoldScheme::Contiguous).unwrap();
        assert_eq!(s.len(), 10);
        for (i, split) in s.iter().enumerate() {
            assert_eq!(split.test, vec![i]);
            assert_eq!(split.train.len(), 9);
        }
    }

    #[test]
    fn contiguous_sizes() {
        let s = kfold(10, 3, FoldScheme::Contiguous).unwrap();
        let sizes: Vec<_> = s.iter().map(|f| f.test.len()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(s[0].test, vec![0, 1, 2, 3]);
        assert_eq!(s[2].test, vec![7, 8, 9]);
    }

    #[test]
    fn random_scheme_is_seeded() {
        let a = kfold(50, 5, FoldScheme::SeededRandom(3)).unwrap();
        assert_eq!(a, kfold(50, 5, FoldScheme::SeededRandom(3)).unwrap());
        assert_ne!(a, kfold(50, 5, FoldScheme::Contiguous).unwrap());
    }

    #[test]
    fn invalid_k() {
        assert!(matches!(
            kfold(3, 5, FoldScheme::Contiguous),
            Err(Error::InsufficientRows { rows: 3, folds: 5 })
        ));
        assert!(kfold(3, 1, FoldScheme::Contiguous).is_err());
    }

    #[test]
    fn linear_data_scores_perfectly() {
        let xs: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                [libm::sin(t), libm::cos(1.3 * t)]
            })
            .collect();
        let ys: Vec<[f64; 1]> = xs.iter().map(|x| [0.5 - 2.0 * x[0] + 3.0 * x[1]]).collect();
        let d = Dataset::from_variables(
            &Matrix::from_rows(&xs).unwrap(),
            Matrix::from_rows(&ys).unwrap(),
        )
        .unwrap();
        let cv =
            cross_validate(&d, 10, FoldScheme::Contiguous, &ModelSpec::LinearRegression).unwrap();
        assert_eq!(cv.fold_r2.len(), 10);
        assert!(cv.fold_r2.iter().flatten().all(|r| (r - 1.0).abs() < 1e-9));
        assert_eq!(cv.fold_assignment[0], 0);
        assert_eq!(cv.fold_assignment[39], 9);
    }
}
