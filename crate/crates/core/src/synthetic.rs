//! Golub-shaped synthetic expression data for examples, tests and benchmarks.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::ExpressionDataset;
use crate::error::{Error, Result};
use crate::rng::rng_from;

const NOISE_SD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_features: usize,
    /// Leading features whose mean shifts with the class.
    pub n_informative: usize,
    /// Samples labelled 1 (AML).
    pub n_positive: usize,
    /// Class mean shift of informative features, in noise standard deviations.
    pub effect_size: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 72 samples (47 ALL / 25 AML) over `n_features` genes.
    pub fn golub_like(n_features: usize, seed: u64) -> Self {
        Self {
            n_samples: 72,
            n_features,
            n_informative: n_features.min(30),
            n_positive: 25,
            effect_size: 1.5,
            seed,
        }
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Log-normal expression levels with per-gene baselines and per-sample
/// intensity offsets; informative genes shift up or down for class 1.
pub fn generate(spec: &SyntheticSpec) -> Result<ExpressionDataset> {
    if spec.n_positive == 0 || spec.n_positive >= spec.n_samples || spec.n_features == 0 {
        return Err(Error::InvalidInput("synthetic spec needs both classes and features".into()));
    }
    if spec.n_informative > spec.n_features {
        return Err(Error::InvalidInput("more informative features than features".into()));
    }
    let mut rng = rng_from(spec.seed);
    let (m, n) = (spec.n_samples, spec.n_features);
    let labels = interleave_labels(m, spec.n_positive);

    let baseline: Vec<f64> = (0..n).map(|_| 5.0 + 2.0 * standard_normal(&mut rng)).collect();
    let direction: Vec<f64> = (0..n)
        .map(|j| match (j < spec.n_informative, rng.random::<bool>()) {
            (false, _) => 0.0,
            (true, true) => 1.0,
            (true, false) => -1.0,
        })
        .collect();
    let offsets: Vec<f64> = (0..m).map(|_| 0.3 * standard_normal(&mut rng)).collect();
    let mut values = DMatrix::zeros(m, n);
    for i in 0..m {
        let sign = if labels[i] == 1 { 0.5 } else { -0.5 };
        for j in 0..n {
            let log_level = baseline[j]
                + offsets[i]
                + direction[j] * sign * spec.effect_size * NOISE_SD
                + NOISE_SD * standard_normal(&mut rng);
            values[(i, j)] = (log_level.exp() * 10.0).round() / 10.0;
        }
    }
    let feature_ids = (0..n).map(|j| format!("G{j:05}_at")).collect();
    let sample_ids = (0..m).map(|i| format!("S{}", i + 1)).collect();
    ExpressionDataset::new(values, feature_ids, labels, sample_ids)
}

/// Spreads `positives` ones evenly through `m` positions.
fn interleave_labels(m: usize, positives: usize) -> Vec<u8> {
    (0..m)
        .map(|i| u8::from((i + 1) * positives / m > i * positives / m))
        .collect()
}
