//! Dendrite Net: plain and residual Dendrite modules plus a final linear
//! read-out, trained by mini-batch gradient descent on mean squared error.
//!
//! Module `l` maps its input `A` (width `w_{l-1}`) to
//!
//! ```text
//! Z = W_l · A
//! A' = Z ∘ G            (plain)
//! A' = Z ∘ G + Z        (residual)
//! ```
//!
//! where `G[j] = X[j mod input_dim]` is the network input `X` (bias first)
//! paired unit-by-unit with the module output. When a module is exactly
//! `input_dim` wide this is the ordinary Hadamard product with `X`. The
//! final layer is a plain linear map.

use alloc::{format, vec, vec::Vec};
use core::num::NonZeroUsize;

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Dataset, Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    input_dim: usize,
    layer_widths: Vec<usize>,
    residual_flags: Vec<bool>,
}

impl Architecture {
    /// `input_dim` counts the bias component. `layer_widths` ends with the
    /// output width; every earlier entry is one Dendrite module.
    pub fn new(
        input_dim: usize,
        layer_widths: Vec<usize>,
        residual_flags: Vec<bool>,
    ) -> Result<Self> {
        if input_dim < 2 {
            return Err(Error::InvalidArchitecture(format!(
                "input_dim must be at least 2 (bias + one variable), got {input_dim}"
            )));
        }
        if layer_widths.is_empty() {
            return Err(Error::InvalidArchitecture("layer_widths is empty".into()));
        }
        if let Some(pos) = layer_widths.iter().position(|&w| w == 0) {
            return Err(Error::InvalidArchitecture(format!(
                "layer {pos} has width 0"
            )));
        }
        if residual_flags.len() != layer_widths.len() - 1 {
            return Err(Error::InvalidArchitecture(format!(
                "expected {} residual flags, got {}",
                layer_widths.len() - 1,
                residual_flags.len()
            )));
        }
        Ok(Self {
            input_dim,
            layer_widths,
            residual_flags,
        })
    }

    /// Non-residual architecture with the given hidden module widths.
    pub fn plain(input_dim: usize, hidden: &[usize], outputs: usize) -> Result<Self> {
        let mut widths = hidden.to_vec();
        widths.push(outputs);
        Self::new(input_dim, widths, vec![false; hidden.len()])
    }

    /// `modules` Dendrite modules, each as wide as the input (bias included).
    pub fn with_default_widths(
        input_dim: usize,
        modules: usize,
        outputs: usize,
        residual: bool,
    ) -> Result<Self> {
        let mut widths = vec![input_dim; modules];
        widths.push(outputs);
        Self::new(input_dim, widths, vec![residual; modules])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn variable_count(&self) -> usize {
        self.input_dim - 1
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.layer_widths
    }

    pub fn residual_flags(&self) -> &[bool] {
        &self.residual_flags
    }

    /// Number of Hadamard modules (the read-out layer is not counted).
    pub fn module_count(&self) -> usize {
        self.residual_flags.len()
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().expect("validated non-empty")
    }

    /// Index into the network input that gates unit `unit` of a module.
    #[inline]
    pub fn gate_index(&self, unit: usize) -> usize {
        unit % self.input_dim
    }

    /// `(rows, cols)` of every weight matrix in layer order.
    pub fn weight_shapes(&self) -> Vec<(usize, usize)> {
        let mut prev = self.input_dim;
        self.layer_widths
            .iter()
            .map(|&w| {
                let shape = (w, prev);
                prev = w;
                shape
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DDModel {
    architecture: Architecture,
    weights: Vec<Matrix>,
}

impl DDModel {
    pub fn new(architecture: Architecture, weights: Vec<Matrix>) -> Result<Self> {
        let shapes = architecture.weight_shapes();
        if weights.len() != shapes.len() {
            return Err(Error::DimensionMismatch {
                context: "weight matrix count",
                expected: shapes.len(),
                found: weights.len(),
            });
        }
        for (l, (w, &(r, c))) in weights.iter().zip(&shapes).enumerate() {
            if w.rows() != r || w.cols() != c {
                return Err(Error::InvalidArchitecture(format!(
                    "weight {l} is {}x{}, expected {r}x{c}",
                    w.rows(),
                    w.cols()
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight matrix {l}")));
            }
        }
        Ok(Self {
            architecture,
            weights,
        })
    }

    pub fn zeros(architecture: Architecture) -> Self {
        let weights = architecture
            .weight_shapes()
            .into_iter()
            .map(|(r, c)| Matrix::zeros(r, c))
            .collect();
        Self {
            architecture,
            weights,
        }
    }

    pub fn architecture(&self) -> &Architecture {
        &self.architecture
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<Matrix> {
        self.weights
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.architecture.input_dim {
            return Err(Error::DimensionMismatch {
                context: "model input",
                expected: self.architecture.input_dim,
                found: x.len(),
            });
        }
        if x[0] != 1.0 {
            return Err(Error::ContractViolation(format!(
                "input component 0 must be the bias 1, got {}",
                x[0]
            )));
        }
        Ok(())
    }

    /// Evaluates the network on one input whose first component is 1.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut trace = Trace::new(&self.architecture);
        self.forward_trace(x, &mut trace);
        Ok(trace.output().to_vec())
    }

    /// Row-wise forward over a feature matrix.
    pub fn predict(&self, features: &Matrix) -> Result<Matrix> {
        let mut out = Matrix::zeros(features.rows(), self.architecture.output_dim());
        let mut trace = Trace::new(&self.architecture);
        for (i, x) in features.row_iter().enumerate() {
            self.check_input(x)?;
            self.forward_trace(x, &mut trace);
            out.row_mut(i).copy_from_slice(trace.output());
        }
        Ok(out)
    }

    fn forward_trace(&self, x: &[f64], trace: &mut Trace) {
        let arch = &self.architecture;
        trace.activations[0].copy_from_slice(x);
        for (l, w) in self.weights.iter().enumerate() {
            let (head, tail) = trace.activations.split_at_mut(l + 1);
            let input = &head[l];
            let out = &mut tail[0];
            w.mul_vec_into(input, out);
            if l < arch.module_count() {
                let residual = arch.residual_flags[l];
                for (j, v) in out.iter_mut().enumerate() {
                    let g = x[arch.gate_index(j)];
                    *v *= if residual { g + 1.0 } else { g };
                }
            }
        }
    }

    /// Exact gradients of `(1/N) Σ ‖forward(x) − y‖²` over the whole dataset.
    pub fn gradients(&self, data: &Dataset) -> Result<Vec<Matrix>> {
        let rows: Vec<usize> = (0..data.len()).collect();
        self.gradients_on(data, &rows)
    }

    /// Gradients restricted to the given rows of `data`.
    pub fn gradients_on(&self, data: &Dataset, rows: &[usize]) -> Result<Vec<Matrix>> {
        self.check_dataset(data)?;
        if rows.is_empty() {
            return Err(Error::Empty("gradient batch"));
        }
        let mut grads: Vec<Matrix> = self
            .weights
            .iter()
            .map(|w| Matrix::zeros(w.rows(), w.cols()))
            .collect();
        let mut scratch = Backprop::new(&self.architecture);
        for &r in rows {
            self.accumulate(
                data.features().row(r),
                data.targets().row(r),
                &mut grads,
                &mut scratch,
            );
        }
        let scale = 2.0 / rows.len() as f64;
        for g in &mut grads {
            g.as_mut_slice().iter_mut().for_each(|v| *v *= scale);
        }
        Ok(grads)
    }

    fn check_dataset(&self, data: &Dataset) -> Result<()> {
        if data.features().cols() != self.architecture.input_dim {
            return Err(Error::DimensionMismatch {
                context: "dataset features",
                expected: self.architecture.input_dim,
                found: data.features().cols(),
            });
        }
        if data.targets().cols() != self.architecture.output_dim() {
            return Err(Error::DimensionMismatch {
                context: "dataset targets",
                expected: self.architecture.output_dim(),
                found: data.targets().cols(),
            });
        }
        Ok(())
    }

    /// Adds the unscaled per-sample gradient of `‖f(x) − y‖² / 2` into `grads`.
    fn accumulate(&self, x: &[f64], y: &[f64], grads: &mut [Matrix], s: &mut Backprop) {
        let arch = &self.architecture;
        self.forward_trace(x, &mut s.trace);
        let layers = self.weights.len();

        let delta = &mut s.deltas[layers];
        for ((d, o), t) in delta.iter_mut().zip(s.trace.output()).zip(y) {
            *d = o - t;
        }
        for l in (0..layers).rev() {
            let (lower, upper) = s.deltas.split_at_mut(l + 1);
            let d_out = &mut upper[0];
            if l < arch.module_count() {
                let residual = arch.residual_flags[l];
                for (j, d) in d_out.iter_mut().enumerate() {
                    let g = x[arch.gate_index(j)];
                    *d *= if residual { g + 1.0 } else { g };
                }
            }
            let input = &s.trace.activations[l];
            let grad = &mut grads[l];
            for (i, &d) in d_out.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for (gv, a) in grad.row_mut(i).iter_mut().zip(input) {
                    *gv += d * a;
                }
            }
            if l > 0 {
                self.weights[l].tr_mul_vec_into(d_out, &mut lower[l]);
            }
        }
    }

    /// Mean squared error over every target entry.
    pub fn mse(&self, data: &Dataset) -> Result<f64> {
        self.check_dataset(data)?;
        if data.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        let mut trace = Trace::new(&self.architecture);
        let mut total = 0.0;
        for (x, y) in data.features().row_iter().zip(data.targets().row_iter()) {
            self.forward_trace(x, &mut trace);
            total += trace
                .output()
                .iter()
                .zip(y)
                .map(|(o, t)| (o - t) * (o - t))
                .sum::<f64>();
        }
        Ok(total / (data.len() * data.output_count()) as f64)
    }

    fn apply_step(&mut self, grads: &[Matrix], learning_rate: f64) {
        for (w, g) in self.weights.iter_mut().zip(grads) {
            w.add_scaled(g, -learning_rate);
        }
    }
}

struct Trace {
    activations: Vec<Vec<f64>>,
}

impl Trace {
    fn new(arch: &Architecture) -> Self {
        let mut activations = Vec::with_capacity(arch.layer_widths.len() + 1);
        activations.push(vec![0.0; arch.input_dim]);
        activations.extend(arch.layer_widths.iter().map(|&w| vec![0.0; w]));
        Self { activations }
    }

    fn output(&self) -> &[f64] {
        self.activations.last().expect("non-empty")
    }
}

struct Backprop {
    trace: Trace,
    deltas: Vec<Vec<f64>>,
}

impl Backprop {
    fn new(arch: &Architecture) -> Self {
        let trace = Trace::new(arch);
        let deltas = trace.activations.clone();
        Self { trace, deltas }
    }
}

/// Weights drawn i.i.d. uniform on `[-init_scale, init_scale]`.
pub fn init_model(architecture: &Architecture, init_scale: f64, rng_seed: u64) -> Result<DDModel> {
    if !(init_scale >= 0.0 && init_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "init_scale must be finite and nonnegative, got {init_scale}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let weights = architecture
        .weight_shapes()
        .into_iter()
        .map(|(r, c)| {
            let data = (0..r * c)
                .map(|_| {
                    if init_scale == 0.0 {
                        0.0
                    } else {
                        rng.random_range(-init_scale..=init_scale)
                    }
                })
                .collect();
            Matrix::from_vec(r, c, data)
        })
        .collect::<Result<Vec<_>>>()?;
    DDModel::new(architecture.clone(), weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchSize {
    Full,
    Rows(NonZeroUsize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: BatchSize,
    pub init_scale: f64,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.02,
            epochs: 2000,
            batch_size: BatchSize::Rows(NonZeroUsize::new(32).unwrap()),
            init_scale: 0.5,
            rng_seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "init_scale must be positive, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: DDModel,
    /// Training MSE after each epoch.
    pub loss_trace: Vec<f64>,
}

/// Mini-batch gradient descent with per-epoch seeded shuffling.
pub fn train(model: &DDModel, data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    model.check_dataset(data)?;
    if data.is_empty() {
        return Err(Error::Empty("training data"));
    }
    let mut model = model.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let batch = match cfg.batch_size {
        BatchSize::Full => data.len(),
        BatchSize::Rows(n) => n.get().min(data.len()),
    };
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        if batch < data.len() {
            order.shuffle(&mut rng);
        }
        for rows in order.chunks(batch) {
            let grads = model.gradients_on(data, rows)?;
            model.apply_step(&grads, cfg.learning_rate);
        }
        let loss = model.mse(data)?;
        if !loss.is_finite() || !model.weights.iter().all(Matrix::is_finite) {
            return Err(Error::Diverged { epoch });
        }
        loss_trace.push(loss);
    }
    Ok(TrainOutcome { model, loss_trace })
}
