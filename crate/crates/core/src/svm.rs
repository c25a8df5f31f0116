//! Binary soft-margin SVM on precomputed kernels, trained by sequential
//! minimal optimization with second-order working-set selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-3;
const MAX_ITERATIONS: usize = 1_000_000;
const TAU: f64 = 1e-12;
const PSD_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Dual coefficient per training sample.
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    /// Training labels in ±1.
    pub labels: Vec<f64>,
    pub c: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

impl SvmModel {
    /// Decision value for one row of kernel evaluations against the training set.
    pub fn decision(&self, kernel_row: impl IntoIterator<Item = f64>) -> f64 {
        self.alphas
            .iter()
            .zip(&self.labels)
            .zip(kernel_row)
            .map(|((a, y), k)| a * y * k)
            .sum::<f64>()
            + self.bias
    }
}

/// `Σα − ½·Σ_ij α_i α_j y_i y_j K_ij`.
pub fn dual_objective(k: &KernelMatrix, y: &[f64], alphas: &[f64]) -> f64 {
    let m = alphas.len();
    let mut quad = 0.0;
    for i in 0..m {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * k.values[(i, j)];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

fn validate(k: &KernelMatrix, y: &[f64], c: f64, tol: f64) -> Result<()> {
    if !k.is_square() || k.shape().0 != y.len() {
        return Err(Error::Shape(format!(
            "kernel {:?} for {} labels",
            k.shape(),
            y.len()
        )));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::Svm("labels must be ±1".into()));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::Svm("training labels contain a single class".into()));
    }
    if !(c > 0.0) || !(tol > 0.0) {
        return Err(Error::Svm(format!("need c > 0 and tol > 0, got {c} and {tol}")));
    }
    if k.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Svm("kernel has non-finite entries".into()));
    }
    let min = k.min_eigenvalue()?;
    if min < -PSD_LIMIT {
        return Err(Error::Svm(format!(
            "kernel is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

pub fn smo_train(k: &KernelMatrix, y: &[f64], c: f64, tol: f64) -> Result<SvmModel> {
    train(k, y, c, tol, None)
}

/// Like [`smo_train`], also returning the dual objective after every pair update.
pub fn smo_train_traced(k: &KernelMatrix, y: &[f64], c: f64, tol: f64) -> Result<(SvmModel, Vec<f64>)> {
    let mut trace = Vec::new();
    let model = train(k, y, c, tol, Some(&mut trace))?;
    Ok((model, trace))
}

fn train(k: &KernelMatrix, y: &[f64], c: f64, tol: f64, mut trace: Option<&mut Vec<f64>>) -> Result<SvmModel> {
    validate(k, y, c, tol)?;
    let kv = &k.values;
    let m = y.len();
    let mut alpha = vec![0.0; m];
    // gradient of ½αᵀQα − Σα with Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; m];

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        for t in 0..m {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..m {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            gmin = gmin.min(v);
            if i == usize::MAX {
                continue;
            }
            let b = gmax - v;
            if b > 0.0 {
                let mut a = kv[(i, i)] + kv[(t, t)] - 2.0 * kv[(i, t)];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < tol {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = kv[(i, i)] + kv[(j, j)] - 2.0 * kv[(i, j)];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..m {
            grad[t] += y[t] * (y[i] * kv[(t, i)] * di + y[j] * kv[(t, j)] * dj);
        }
        if let Some(trace) = trace.as_deref_mut() {
            // W = ½Σα_t(1 − G_t)
            trace.push(0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (1.0 - g)).sum::<f64>());
        }
    }

    // adding 0.0 turns -0.0 into 0.0
    let bias = -rho(&alpha, &grad, y, c) + 0.0;
    let support_indices = (0..m).filter(|&t| alpha[t] > 0.0).collect();
    Ok(SvmModel {
        dual_objective: dual_objective(k, y, &alpha),
        alphas: alpha,
        bias,
        support_indices,
        labels: y.to_vec(),
        c,
        iterations,
    })
}

/// Offset from free support vectors, or the midpoint of the feasible
/// interval when every alpha sits at a bound.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    }
}

/// Labels (ties go to +1) and decision values for a test × train kernel.
pub fn predict(model: &SvmModel, k_cross: &KernelMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let (rows, cols) = k_cross.shape();
    if cols != model.alphas.len() {
        return Err(Error::Shape(format!(
            "cross kernel has {cols} columns, model has {} training samples",
            model.alphas.len()
        )));
    }
    let decisions: Vec<f64> = (0..rows)
        .map(|t| model.decision(k_cross.values.row(t).iter().copied()))
        .collect();
    let labels = decisions
        .iter()
        .map(|&f| if f >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    Ok((labels, decisions))
}
