//! Empirical quantum advantage (EQA) analysis of quantum kernels on gene
//! expression data.
//!
//! The crate covers the whole pipeline:
//!
//! - [`data`]: CSV ingestion, quantile normalization, min-max angle scaling,
//!   stratified splits and subsamples.
//! - [`feature_select`]: Lasso selection by coordinate descent and
//!   relevance/redundancy QUBO selection solved by simulated annealing.
//! - [`qsim`]: ZZ and Pauli-Z feature-map circuits, an exact dense statevector
//!   simulator, and circuit resource estimates.
//! - [`kernels`]: quantum fidelity kernels and the classical linear kernel.
//! - [`svm`]: soft-margin SVM trained by SMO on precomputed kernels.
//! - [`metrics`]: F1, balanced accuracy, geometric difference and terrain
//!   ruggedness surfaces.
//! - [`sweep`]: the (features × samples) configuration grid experiment.
//! - [`cli`]: the `eqa` command-line front end.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod cli;
pub mod data;
pub mod error;
pub mod feature_select;
pub mod kernels;
pub mod metrics;
pub mod qsim;
pub mod rng;
pub mod svm;
pub mod sweep;
pub mod synthetic;

pub use error::{Error, Result};
