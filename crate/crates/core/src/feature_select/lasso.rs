use nalgebra::{DMatrix, DVector};
use serde_json::json;

use super::{FeatureSelection, SelectionMethod};
use crate::error::{Error, Result};

const LAMBDA_FLOOR: f64 = 1e-6;
const BISECTION_STEPS: usize = 60;

/// Coordinate-descent stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoSettings {
    /// Converged once no coefficient moves by more than this in a cycle.
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for LassoSettings {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_cycles: 10_000,
        }
    }
}

fn check_finite(x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!("{} rows but {} targets", x.nrows(), y.len())));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::Shape("lasso needs a non-empty design matrix".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("lasso input contains non-finite values".into()));
    }
    Ok(())
}

/// Centers each column and scales it to unit population variance.
/// Constant columns become all-zero.
pub fn standardize_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows() as f64;
    let mut z = x.clone();
    for mut col in z.column_iter_mut() {
        let mean = col.sum() / m;
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / m).sqrt();
        if sd > 0.0 {
            col /= sd;
        } else {
            col.fill(0.0);
        }
    }
    z
}

/// Smallest penalty for which every coefficient is zero.
pub fn lambda_max(z: &DMatrix<f64>, y: &[f64]) -> f64 {
    let m = z.nrows() as f64;
    let y = DVector::from_column_slice(y);
    z.column_iter()
        .map(|c| (c.dot(&y) / m).abs())
        .fold(0.0, f64::max)
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent on an already standardized design, starting from
/// `beta`. Sweeps the active set to convergence between full passes.
fn coordinate_descent(
    z: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    beta: &mut DVector<f64>,
    settings: LassoSettings,
) {
    let m = z.nrows() as f64;
    let p = z.ncols();
    let curvature: Vec<f64> = z.column_iter().map(|c| c.norm_squared() / m).collect();
    let mut residual = DVector::from_column_slice(y) - z * &*beta;

    let update = |j: usize, beta: &mut DVector<f64>, residual: &mut DVector<f64>| -> f64 {
        let c = curvature[j];
        if c == 0.0 {
            beta[j] = 0.0;
            return 0.0;
        }
        let col = z.column(j);
        let old = beta[j];
        let rho = col.dot(residual) / m + c * old;
        let new = soft_threshold(rho, lambda) / c;
        let delta = new - old;
        if delta != 0.0 {
            residual.axpy(-delta, &col, 1.0);
            beta[j] = new;
        }
        delta.abs()
    };

    let mut cycles = 0;
    while cycles < settings.max_cycles {
        let mut max_change = 0.0f64;
        for j in 0..p {
            max_change = max_change.max(update(j, beta, &mut residual));
        }
        cycles += 1;
        if max_change < settings.tol {
            return;
        }
        let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
        while cycles < settings.max_cycles {
            let mut max_change = 0.0f64;
            for &j in &active {
                max_change = max_change.max(update(j, beta, &mut residual));
            }
            cycles += 1;
            if max_change < settings.tol {
                break;
            }
        }
    }
}

/// Minimizes `(1/2m)·||y − Zβ||² + λ·||β||₁` where `Z` is `x` with standardized
/// columns. Coefficients are on the standardized scale.
pub fn lasso_fit(x: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<DVector<f64>> {
    lasso_fit_with(x, y, lambda, LassoSettings::default())
}

pub fn lasso_fit_with(
    x: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    settings: LassoSettings,
) -> Result<DVector<f64>> {
    check_finite(x, y)?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("lambda {lambda} must be >= 0")));
    }
    let z = standardize_columns(x);
    let mut beta = DVector::zeros(z.ncols());
    coordinate_descent(&z, y, lambda, &mut beta, settings);
    Ok(beta)
}

fn nonzero(beta: &DVector<f64>) -> usize {
    beta.iter().filter(|b| **b != 0.0).count()
}

/// Finds a penalty giving exactly `k` nonzero coefficients by bisection on
/// `log λ` over `[1e-6, λ_max]`. When `k` is skipped on the path the closest
/// count is returned and `warning` is set.
pub fn lasso_select_k(x: &DMatrix<f64>, y: &[f64], k: usize) -> Result<FeatureSelection> {
    check_finite(x, y)?;
    let p = x.ncols();
    if k == 0 || k >= p {
        return Err(Error::InvalidInput(format!(
            "k = {k} must satisfy 1 <= k < {p} features"
        )));
    }
    let settings = LassoSettings::default();
    let z = standardize_columns(x);
    let hi_start = lambda_max(&z, y);
    if hi_start <= LAMBDA_FLOOR {
        return Err(Error::InvalidInput(
            "no feature is correlated with the labels".into(),
        ));
    }

    let (mut lo, mut hi) = (LAMBDA_FLOOR.ln(), hi_start.ln());
    let mut beta = DVector::zeros(p);
    let mut best: Option<(usize, f64, DVector<f64>)> = None;
    let mut exact = false;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let lambda = mid.exp();
        coordinate_descent(&z, y, lambda, &mut beta, settings);
        let count = nonzero(&beta);
        let better = match &best {
            None => true,
            Some((c, _, _)) => count.abs_diff(k) < c.abs_diff(k),
        };
        if better {
            best = Some((count, lambda, beta.clone()));
        }
        match count.cmp(&k) {
            std::cmp::Ordering::Equal => {
                exact = true;
                break;
            }
            std::cmp::Ordering::Greater => lo = mid,
            std::cmp::Ordering::Less => hi = mid,
        }
    }

    let (count, lambda, beta) = best.expect("at least one bisection step");
    let scored = beta
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(j, b)| (j, b.abs()))
        .collect();
    let mut sel = FeatureSelection::from_scored(scored, SelectionMethod::Lasso, k);
    sel.parameters.insert("lambda".into(), json!(lambda));
    sel.parameters.insert("lambda_max".into(), json!(hi_start));
    sel.parameters.insert("nonzero".into(), json!(count));
    if !exact {
        sel.warning = Some(format!(
            "requested {k} features; closest count on the regularization path is {count}"
        ));
    }
    Ok(sel)
}
