//! Ground-truth muscle/force systems for desk-scale validation.
//!
//! Each channel activation follows an offset sinusoid
//! `e_i(t) = A_i · (1 + sin(2π f_i t + φ_i)) / 2`, which is nonnegative like
//! an RMS envelope. Forces are known polynomials of the activations plus
//! optional Gaussian noise, so a fitted model's spectrum can be scored
//! against the truth.

use alloc::{format, string::String, vec::Vec};
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::{
    dendrite::init_model,
    signal::{Channel, Recording},
    spectrum::{base_items, expand_polys},
    Architecture, DDModel, Error, Result, SparsePoly,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthSystem {
    pub variable_names: Vec<String>,
    pub output_names: Vec<String>,
    /// One polynomial per output over the activations.
    pub polys: Vec<SparsePoly>,
    pub frequencies_hz: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases_rad: Vec<f64>,
    pub noise_sd: f64,
    /// Store activation × unit Gaussian carrier in the EMG channels instead
    /// of the bare activation, so an RMS envelope recovers the activation.
    pub emg_carrier: bool,
}

impl GroundTruthSystem {
    pub fn validate(&self) -> Result<()> {
        let v = self.variable_names.len();
        if v == 0 {
            return Err(Error::Empty("ground-truth variables"));
        }
        for (name, len) in [
            ("frequencies_hz", self.frequencies_hz.len()),
            ("amplitudes", self.amplitudes.len()),
            ("phases_rad", self.phases_rad.len()),
        ] {
            if len != v {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {len} entries for {v} variables"
                )));
            }
        }
        if self.polys.len() != self.output_names.len() {
            return Err(Error::DimensionMismatch {
                context: "ground-truth outputs",
                expected: self.output_names.len(),
                found: self.polys.len(),
            });
        }
        if let Some(p) = self.polys.iter().find(|p| p.nvars() != v) {
            return Err(Error::VariableCountMismatch {
                left: v,
                right: p.nvars(),
            });
        }
        if self
            .frequencies_hz
            .iter()
            .any(|&f| !(f > 0.0 && f.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "activation frequencies must be positive".into(),
            ));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidParameter(
                "noise_sd must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Activation of every channel at time `t` seconds.
    pub fn activations(&self, t: f64) -> Vec<f64> {
        self.frequencies_hz
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.phases_rad)
            .map(|((f, a), p)| a * (1.0 + libm::sin(2.0 * PI * f * t + p)) / 2.0)
            .collect()
    }
}

/// Dense random polynomials of degree ≤ 2: every item gets a coefficient
/// uniform on `[-scale, scale]`.
pub fn random_quadratic_polys(
    nvars: usize,
    outputs: usize,
    scale: f64,
    seed: u64,
) -> Vec<SparsePoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<usize> = (0..nvars).collect();
    let items = base_items(nvars, &order);
    (0..outputs)
        .map(|_| {
            SparsePoly::from_terms(
                nvars,
                items
                    .iter()
                    .map(|m| (m.clone(), rng.random_range(-scale..=scale)))
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

/// Degree-2 polynomials realized by a random two-module Dendrite Net of
/// the given hidden width: weights uniform on `[-scale, scale]`, with every
/// second-module path that would multiply a quadratic unit by a variable
/// cut, so the network is exactly quadratic. Systems drawn this way lie in
/// the model class of a plain two-module net of that width.
pub fn dendrite_quadratic_polys(
    nvars: usize,
    outputs: usize,
    width: usize,
    scale: f64,
    seed: u64,
) -> Result<Vec<SparsePoly>> {
    let arch = Architecture::plain(nvars + 1, &[width, width], outputs)?;
    let model = init_model(&arch, scale, seed)?;
    let mut weights = model.into_weights();
    for j in 0..width {
        for k in 0..width {
            if arch.gate_index(j) != 0 && arch.gate_index(k) != 0 {
                weights[1][(j, k)] = 0.0;
            }
        }
    }
    expand_polys(&DDModel::new(arch, weights)?)
}

/// Uniform phases on `[0, 2π)`.
pub fn random_phases(nvars: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..nvars)
        .map(|_| rng.random_range(0.0..2.0 * PI))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub recording: Recording,
    /// Noise-free activations per channel, in recording order.
    pub activations: Vec<Vec<f64>>,
    pub truth: Vec<SparsePoly>,
}

/// Samples `round(duration_s · sample_rate_hz)` points of the system.
pub fn synthesize_recording(
    sys: &GroundTruthSystem,
    duration_s: f64,
    sample_rate_hz: f64,
    rng_seed: u64,
) -> Result<Synthesis> {
    sys.validate()?;
    if !(duration_s > 0.0 && sample_rate_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "duration and sample rate must be positive".into(),
        ));
    }
    let n = libm::round(duration_s * sample_rate_hz) as usize;
    let v = sys.variable_names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let noise =
        Normal::new(0.0, sys.noise_sd).map_err(|e| Error::InvalidParameter(format!("{e}")))?;

    let mut activations = alloc::vec![Vec::with_capacity(n); v];
    let mut emg = alloc::vec![Vec::with_capacity(n); v];
    let mut forces = alloc::vec![Vec::with_capacity(n); sys.polys.len()];
    for i in 0..n {
        let t = i as f64 / sample_rate_hz;
        let e = sys.activations(t);
        for (c, &val) in e.iter().enumerate() {
            activations[c].push(val);
            let stored = if sys.emg_carrier {
                let g: f64 = StandardNormal.sample(&mut rng);
                val * g
            } else {
                val
            };
            emg[c].push(stored);
        }
        for (o, p) in sys.polys.iter().enumerate() {
            let mut y = p.eval(&e)?;
            if sys.noise_sd > 0.0 {
                y += noise.sample(&mut rng);
            }
            forces[o].push(y);
        }
    }
    let recording = Recording::new(
        sample_rate_hz,
        sys.variable_names
            .iter()
            .zip(emg)
            .map(|(n, s)| Channel::new(n.clone(), s))
            .collect(),
        sys.output_names
            .iter()
            .zip(forces)
            .map(|(n, s)| Channel::new(n.clone(), s))
            .collect(),
    )?;
    Ok(Synthesis {
        recording,
        activations,
        truth: sys.polys.clone(),
    })
}
