//! Classification scores and kernel/landscape comparison metrics.

use std::io::{Read, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;

/// Default ridge added to the classical kernel before inversion.
pub const DEFAULT_GEODIFF_REG: f64 = 1e-7;

fn check_lengths(y_true: &[u8], y_pred: &[u8]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Metric(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Metric("no labels to score".into()));
    }
    Ok(())
}

/// `2·TP / (2·TP + FP + FN)`, zero when the denominator vanishes.
pub fn f1_score(y_true: &[u8], y_pred: &[u8], positive: u8) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == positive, p == positive) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fneg += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fneg;
    Ok(if denom == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 })
}

/// Mean of the true-positive and true-negative rates (positive class = 1).
pub fn balanced_accuracy(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    let mut counts = [[0usize; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[usize::from(t == 1)][usize::from(p == 1)] += 1;
    }
    let pos = counts[1][0] + counts[1][1];
    let neg = counts[0][0] + counts[0][1];
    if pos == 0 || neg == 0 {
        return Err(Error::Metric("balanced accuracy needs both classes in the truth".into()));
    }
    let tpr = counts[1][1] as f64 / pos as f64;
    let tnr = counts[0][0] as f64 / neg as f64;
    Ok(0.5 * (tpr + tnr))
}

fn trace_normalized(k: &KernelMatrix) -> Result<DMatrix<f64>> {
    let mut mtx = k.values.clone();
    let n = mtx.nrows();
    // symmetrize
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (mtx[(i, j)] + mtx[(j, i)]);
            mtx[(i, j)] = v;
            mtx[(j, i)] = v;
        }
    }
    let tr = mtx.trace();
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::Metric(format!("kernel trace {tr} cannot be normalized")));
    }
    Ok(mtx * (n as f64 / tr))
}

/// `g = sqrt(‖√K_Q (K_C + reg·I)⁻¹ √K_Q‖₂)` after scaling both kernels to
/// trace `m`. Negative eigenvalues are clamped to zero.
pub fn geometric_difference(k_classical: &KernelMatrix, k_quantum: &KernelMatrix, reg: f64) -> Result<f64> {
    if !k_classical.is_square() || k_classical.shape() != k_quantum.shape() {
        return Err(Error::Shape(format!(
            "kernels {:?} and {:?} must be square and equal in shape",
            k_classical.shape(),
            k_quantum.shape()
        )));
    }
    if k_classical.values.is_empty() {
        return Err(Error::Metric("empty kernels".into()));
    }
    if !(reg >= 0.0) {
        return Err(Error::Metric(format!("regularization {reg} must be >= 0")));
    }
    let kc = trace_normalized(k_classical)?;
    let kq = trace_normalized(k_quantum)?;

    let eq = SymmetricEigen::new(kq);
    let sqrt_vals = eq.eigenvalues.map(|v| v.max(0.0).sqrt());
    let sqrt_q = &eq.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eq.eigenvectors.transpose();

    let ec = SymmetricEigen::new(kc);
    let inv_vals = ec.eigenvalues.map(|v| 1.0 / (v.max(0.0) + reg));
    let inv_c = &ec.eigenvectors * DMatrix::from_diagonal(&inv_vals) * ec.eigenvectors.transpose();

    let mut inner = &sqrt_q * inv_c * &sqrt_q;
    let n = inner.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (inner[(i, j)] + inner[(j, i)]);
            inner[(i, j)] = v;
            inner[(j, i)] = v;
        }
    }
    let norm = SymmetricEigen::new(inner).eigenvalues.amax();
    let g = norm.sqrt();
    if !g.is_finite() {
        return Err(Error::Metric("geometric difference is not finite".into()));
    }
    Ok(g)
}

/// Metric values over the (feature count × sample count) grid. A `None` cell
/// is a configuration that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSurface {
    pub metric_name: String,
    pub kernel_name: String,
    pub feature_axis: Vec<usize>,
    pub sample_axis: Vec<usize>,
    /// `values[f][s]` for `feature_axis[f]`, `sample_axis[s]`.
    pub values: Vec<Vec<Option<f64>>>,
}

impl MetricSurface {
    pub fn new(
        metric_name: impl Into<String>,
        kernel_name: impl Into<String>,
        feature_axis: Vec<usize>,
        sample_axis: Vec<usize>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cells = values
            .into_iter()
            .map(|row| row.into_iter().map(Some).collect())
            .collect();
        Self::from_cells(metric_name, kernel_name, feature_axis, sample_axis, cells)
    }

    pub fn from_cells(
        metric_name: impl Into<String>,
        kernel_name: impl Into<String>,
        feature_axis: Vec<usize>,
        sample_axis: Vec<usize>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if values.len() != feature_axis.len() || values.iter().any(|r| r.len() != sample_axis.len()) {
            return Err(Error::Shape(format!(
                "grid does not match axes of length {} × {}",
                feature_axis.len(),
                sample_axis.len()
            )));
        }
        if values.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Metric("surface values must be finite".into()));
        }
        Ok(Self {
            metric_name: metric_name.into(),
            kernel_name: kernel_name.into(),
            feature_axis,
            sample_axis,
            values,
        })
    }

    pub fn get(&self, f: usize, s: usize) -> Option<f64> {
        self.values[f][s]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.feature_axis.len(), self.sample_axis.len())
    }

    fn same_axes(&self, other: &Self) -> bool {
        self.feature_axis == other.feature_axis && self.sample_axis == other.sample_axis
    }

    /// Tidy rows `feature_count,sample_count,value`; failed cells are empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature_count", "sample_count", "value"])?;
        for (fi, f) in self.feature_axis.iter().enumerate() {
            for (si, s) in self.sample_axis.iter().enumerate() {
                let v = self.values[fi][si].map(|v| v.to_string()).unwrap_or_default();
                w.write_record([f.to_string(), s.to_string(), v])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, metric_name: &str, kernel_name: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut cells = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = || Error::InvalidInput(format!("malformed surface row on line {}", line + 2));
            if rec.len() != 3 {
                return Err(bad());
            }
            let f: usize = rec[0].parse().map_err(|_| bad())?;
            let s: usize = rec[1].parse().map_err(|_| bad())?;
            let v = if rec[2].is_empty() {
                None
            } else {
                Some(rec[2].parse::<f64>().map_err(|_| bad())?)
            };
            cells.push((f, s, v));
        }
        let mut feature_axis: Vec<usize> = cells.iter().map(|c| c.0).collect();
        let mut sample_axis: Vec<usize> = cells.iter().map(|c| c.1).collect();
        feature_axis.sort_unstable();
        feature_axis.dedup();
        sample_axis.sort_unstable();
        sample_axis.dedup();
        let mut values = vec![vec![None; sample_axis.len()]; feature_axis.len()];
        let mut seen = vec![vec![false; sample_axis.len()]; feature_axis.len()];
        for (f, s, v) in cells {
            let fi = feature_axis.binary_search(&f).expect("axis built from cells");
            let si = sample_axis.binary_search(&s).expect("axis built from cells");
            if seen[fi][si] {
                return Err(Error::InvalidInput(format!("duplicate surface cell ({f}, {s})")));
            }
            seen[fi][si] = true;
            values[fi][si] = v;
        }
        if seen.iter().flatten().any(|s| !s) {
            return Err(Error::InvalidInput("surface grid is incomplete".into()));
        }
        Self::from_cells(metric_name, kernel_name, feature_axis, sample_axis, values)
    }
}

/// Terrain ruggedness: `sqrt(Σ (v_nb − v)²)` over the existing 8-neighbours.
pub fn tri_surface(surface: &MetricSurface) -> Result<MetricSurface> {
    let (rows, cols) = surface.shape();
    if rows < 2 || cols < 2 {
        return Err(Error::Metric(format!(
            "ruggedness needs at least a 2×2 grid, got {rows}×{cols}"
        )));
    }
    let mut out = vec![vec![None; cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            let Some(center) = surface.get(r, c) else {
                continue;
            };
            let mut sum = 0.0;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= rows as i64 || nc >= cols as i64 {
                        continue;
                    }
                    if let Some(v) = surface.get(nr as usize, nc as usize) {
                        sum += (v - center) * (v - center);
                    }
                }
            }
            out[r][c] = Some(sum.sqrt());
        }
    }
    MetricSurface::from_cells(
        format!("tri_{}", surface.metric_name),
        surface.kernel_name.clone(),
        surface.feature_axis.clone(),
        surface.sample_axis.clone(),
        out,
    )
}

/// Ruggedness of both landscapes plus `TRI_quantum − TRI_classical`.
pub fn ptri_comparison(
    classical: &MetricSurface,
    quantum: &MetricSurface,
) -> Result<(MetricSurface, MetricSurface, MetricSurface)> {
    if !classical.same_axes(quantum) {
        return Err(Error::Metric("classical and quantum surfaces have different axes".into()));
    }
    let tc = tri_surface(classical)?;
    let tq = tri_surface(quantum)?;
    let diff = tq
        .values
        .iter()
        .zip(&tc.values)
        .map(|(rq, rc)| {
            rq.iter()
                .zip(rc)
                .map(|(q, c)| Some((*q)? - (*c)?))
                .collect()
        })
        .collect();
    let diff = MetricSurface::from_cells(
        tq.metric_name.clone(),
        "difference",
        tq.feature_axis.clone(),
        tq.sample_axis.clone(),
        diff,
    )?;
    Ok((tc, tq, diff))
}
