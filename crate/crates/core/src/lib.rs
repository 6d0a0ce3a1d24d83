//! Dendrite Net models and their relation spectra.
//!
//! A Dendrite Net (DD) alternates linear maps with element-wise products
//! against the network input, so every trained model is exactly a
//! multivariate polynomial in its inputs. This crate trains such models,
//! expands them into that polynomial (the relation spectrum), and carries
//! the numerical pieces needed around it: a least-squares baseline,
//! cross-validation, a paired t-test, the EMG pre-processing chain, and a
//! synthetic ground-truth generator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the companion `relspec` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod cv;
pub mod dataset;
pub mod dendrite;
mod error;
pub mod linreg;
pub mod matrix;
pub mod metrics;
pub mod poly;
pub mod signal;
pub mod spectrum;
pub mod stats;
pub mod synth;

pub use self::{
    dataset::Dataset,
    dendrite::{Architecture, BatchSize, DDModel, TrainConfig},
    error::{Error, Result},
    matrix::Matrix,
    poly::{Monomial, SparsePoly},
    spectrum::RelationSpectrum,
};
