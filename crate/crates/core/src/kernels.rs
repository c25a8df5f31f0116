//! Gram matrices from quantum feature-map fidelities and the linear kernel.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{build_feature_map, simulate, FeatureMapKind, Statevector};

/// Tolerance on the smallest eigenvalue of a Gram matrix.
pub const PSD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    QuantumZz,
    QuantumPauliZ,
    Linear,
    /// Imported from a file without a recognised kind tag.
    Precomputed,
}

impl KernelKind {
    pub fn quantum(map: FeatureMapKind) -> Self {
        match map {
            FeatureMapKind::Zz => KernelKind::QuantumZz,
            FeatureMapKind::PauliZ => KernelKind::QuantumPauliZ,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::QuantumZz => "quantum_zz",
            KernelKind::QuantumPauliZ => "quantum_pauli_z",
            KernelKind::Linear => "linear",
            KernelKind::Precomputed => "precomputed",
        }
    }

    fn parse(s: &str) -> Self {
        match s {
            "quantum_zz" => KernelKind::QuantumZz,
            "quantum_pauli_z" => KernelKind::QuantumPauliZ,
            "linear" => KernelKind::Linear,
            _ => KernelKind::Precomputed,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kernel values between row samples and column samples.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: DMatrix<f64>,
    pub kind: KernelKind,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
}

fn index_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl KernelMatrix {
    pub fn new(values: DMatrix<f64>, kind: KernelKind) -> Self {
        let (r, c) = values.shape();
        Self {
            values,
            kind,
            row_ids: index_ids(r),
            col_ids: index_ids(c),
        }
    }

    pub fn with_ids(mut self, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        if row_ids.len() != self.values.nrows() || col_ids.len() != self.values.ncols() {
            return Err(Error::Shape(format!(
                "{}×{} ids for a {:?} kernel",
                row_ids.len(),
                col_ids.len(),
                self.values.shape()
            )));
        }
        self.row_ids = row_ids;
        self.col_ids = col_ids;
        Ok(self)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn is_square(&self) -> bool {
        self.values.is_square()
    }

    /// Replaces the matrix by `(K + Kᵀ)/2`.
    pub fn symmetrize(&mut self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Shape("cannot symmetrize a rectangular kernel".into()));
        }
        let n = self.values.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.values[(i, j)] + self.values[(j, i)]);
                self.values[(i, j)] = v;
                self.values[(j, i)] = v;
            }
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Shape("eigenvalues need a square kernel".into()));
        }
        if self.values.is_empty() {
            return Ok(0.0);
        }
        Ok(SymmetricEigen::new(self.values.clone()).eigenvalues.min())
    }

    /// Errors unless the smallest eigenvalue is at least `-tol`.
    pub fn check_psd(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -tol {
            return Err(Error::InvalidInput(format!(
                "kernel is not positive semidefinite: min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// CSV with the kind name in the corner cell, column ids across the
    /// header and row ids down the first column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.kind.name().to_string()];
        header.extend(self.col_ids.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.row_ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.values.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let kind = KernelKind::parse(header.first().map(String::as_str).unwrap_or(""));
        let col_ids = header[1..].to_vec();
        let mut row_ids = Vec::new();
        let mut data = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            row_ids.push(rec[0].to_string());
            for cell in rec.iter().skip(1) {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::InvalidInput(format!("kernel cell {cell:?} on line {} is not a number", line + 2))
                })?;
                data.push(v);
            }
        }
        let values = DMatrix::from_row_slice(row_ids.len(), col_ids.len(), &data);
        KernelMatrix::new(values, kind).with_ids(row_ids, col_ids)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path.as_ref())?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref())?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

fn row(a: &DMatrix<f64>, i: usize) -> Vec<f64> {
    a.row(i).iter().copied().collect()
}

/// Encodes every row of `a` once.
pub fn feature_states(a: &DMatrix<f64>, map: FeatureMapKind, r: usize) -> Result<Vec<Statevector>> {
    (0..a.nrows())
        .into_par_iter()
        .map(|i| simulate(&build_feature_map(map, &row(a, i), r)?))
        .collect()
}

/// `|⟨Φ(y)|Φ(x)⟩|²` from exact statevectors.
pub fn quantum_kernel_entry(x: &[f64], y: &[f64], map: FeatureMapKind, r: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    let sx = simulate(&build_feature_map(map, x, r)?)?;
    let sy = simulate(&build_feature_map(map, y, r)?)?;
    Ok(sy.fidelity(&sx))
}

fn fidelity_matrix(rows: &[Statevector], cols: &[Statevector]) -> DMatrix<f64> {
    let entries: Vec<f64> = (0..rows.len() * cols.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / cols.len(), k % cols.len());
            cols[j].fidelity(&rows[i])
        })
        .collect();
    DMatrix::from_row_slice(rows.len(), cols.len(), &entries)
}

/// Kernel between the rows of `a` (as rows) and the rows of `b` (as columns).
pub fn quantum_kernel_matrix(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    map: FeatureMapKind,
    r: usize,
) -> Result<KernelMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Shape(format!(
            "{} and {} features",
            a.ncols(),
            b.ncols()
        )));
    }
    let sa = feature_states(a, map, r)?;
    let sb = feature_states(b, map, r)?;
    Ok(KernelMatrix::new(fidelity_matrix(&sa, &sb), KernelKind::quantum(map)))
}

/// Square Gram matrix over the rows of `a`; the upper triangle is computed
/// and mirrored.
pub fn quantum_gram(a: &DMatrix<f64>, map: FeatureMapKind, r: usize) -> Result<KernelMatrix> {
    let states = feature_states(a, map, r)?;
    let m = states.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let upper: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| states[j].fidelity(&states[i]))
        .collect();
    let mut values = DMatrix::zeros(m, m);
    for (&(i, j), &v) in pairs.iter().zip(&upper) {
        values[(i, j)] = v;
        values[(j, i)] = v;
    }
    Ok(KernelMatrix::new(values, KernelKind::quantum(map)))
}

/// `K = A·Bᵀ`.
pub fn linear_kernel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<KernelMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Shape(format!(
            "{} and {} features",
            a.ncols(),
            b.ncols()
        )));
    }
    Ok(KernelMatrix::new(a * b.transpose(), KernelKind::Linear))
}

/// `A·Aᵀ` with an exactly symmetric result.
pub fn linear_gram(a: &DMatrix<f64>) -> KernelMatrix {
    let m = a.nrows();
    let mut values = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = a.row(i).dot(&a.row(j));
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    KernelMatrix::new(values, KernelKind::Linear)
}
