use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::lasso::standardize_columns;
use super::{FeatureSelection, SelectionMethod};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};

/// Largest instance `exhaustive_solve` will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Upper-triangular QUBO `E(x) = Σ_{i<=j} q_ij·x_i·x_j` over binary `x`,
/// stored packed row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    n: usize,
    upper: Vec<f64>,
    pub cardinality: usize,
    pub penalty_weight: f64,
    pub redundancy_weight: f64,
    /// Per-variable relevance `|pearson(X_i, y)|`; empty for hand-built problems.
    pub relevance: Vec<f64>,
}

impl QuboProblem {
    pub fn zeros(n: usize, cardinality: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
            cardinality,
            penalty_weight: 0.0,
            redundancy_weight: 0.0,
            relevance: Vec::new(),
        }
    }

    /// Builds from a dense matrix whose strict lower triangle must be zero.
    pub fn from_dense(q: &DMatrix<f64>, cardinality: usize) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n || n == 0 {
            return Err(Error::Shape(format!("QUBO matrix must be square, got {:?}", q.shape())));
        }
        if cardinality == 0 || cardinality > n {
            return Err(Error::InvalidInput(format!(
                "cardinality {cardinality} outside 1..={n}"
            )));
        }
        let mut p = Self::zeros(n, cardinality);
        for i in 0..n {
            for j in 0..n {
                let v = q[(i, j)];
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!("q[{i}][{j}] is not finite")));
                }
                if j < i && v != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "q[{i}][{j}] = {v} below the diagonal"
                    )));
                }
                if j >= i {
                    p.set(i, j, v);
                }
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        // row i starts after rows 0..i, which hold n + (n-1) + ... + (n-i+1) entries
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// `q[i][j]`; zero below the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > j {
            0.0
        } else {
            self.upper[self.offset(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i <= j && j < self.n, "q[{i}][{j}] is not in the upper triangle");
        let o = self.offset(i, j);
        self.upper[o] = v;
    }

    /// Symmetric coupling seen by a single-bit flip.
    fn coupling(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.get(i, j)
        } else {
            self.get(j, i)
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

fn energy_of_selected(p: &QuboProblem, selected: &[usize]) -> f64 {
    let mut e = 0.0;
    for (a, &i) in selected.iter().enumerate() {
        for &j in &selected[a..] {
            e += p.get(i, j);
        }
    }
    e
}

pub fn qubo_energy(p: &QuboProblem, bits: &[u8]) -> Result<f64> {
    if bits.len() != p.n {
        return Err(Error::Shape(format!(
            "{} bits for a {}-variable QUBO",
            bits.len(),
            p.n
        )));
    }
    let selected: Vec<usize> = (0..p.n).filter(|&i| bits[i] != 0).collect();
    Ok(energy_of_selected(p, &selected))
}

/// Pearson correlation; zero when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / m, b.iter().sum::<f64>() / m);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
    }
}

/// Relevance/redundancy QUBO: the expansion of
/// `−Σ|r_iy|·x_i + α·Σ_{i<j}|r_ij|·x_i·x_j + λ·(Σx_i − k)²` without the `λk²` constant.
pub fn build_qubo(
    x: &DMatrix<f64>,
    y: &[f64],
    k: usize,
    alpha: f64,
    penalty_weight: f64,
) -> Result<QuboProblem> {
    let (m, n) = x.shape();
    if y.len() != m {
        return Err(Error::Shape(format!("{m} rows but {} labels", y.len())));
    }
    if n == 0 || m < 2 {
        return Err(Error::Shape("QUBO construction needs >= 2 samples and >= 1 feature".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..={n}")));
    }
    if !(alpha >= 0.0 && penalty_weight >= 0.0) {
        return Err(Error::InvalidInput("QUBO weights must be non-negative".into()));
    }
    let relevance = relevance(x, y);
    let z = standardize_columns(x);
    Ok(assemble(&z, relevance, k, alpha, penalty_weight))
}

/// `build_qubo` with `α = 0.5` and `λ = 2·max|r_iy|`.
pub fn build_qubo_default(x: &DMatrix<f64>, y: &[f64], k: usize) -> Result<QuboProblem> {
    let rel = relevance(x, y);
    let max_rel = rel.iter().copied().fold(0.0, f64::max);
    let penalty = if max_rel > 0.0 { 2.0 * max_rel } else { 1.0 };
    build_qubo(x, y, k, 0.5, penalty)
}

/// Same construction from precomputed correlations; `redundancy` is read
/// above the diagonal and absolute values are taken.
pub fn qubo_from_correlations(
    relevance: &[f64],
    redundancy: &DMatrix<f64>,
    k: usize,
    alpha: f64,
    penalty_weight: f64,
) -> Result<QuboProblem> {
    let n = relevance.len();
    if redundancy.shape() != (n, n) {
        return Err(Error::Shape(format!(
            "{n} relevances but a {:?} redundancy matrix",
            redundancy.shape()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..={n}")));
    }
    let mut p = QuboProblem::zeros(n, k);
    for i in 0..n {
        p.set(i, i, -relevance[i].abs() + penalty_weight * (1.0 - 2.0 * k as f64));
        for j in i + 1..n {
            p.set(i, j, alpha * redundancy[(i, j)].abs() + 2.0 * penalty_weight);
        }
    }
    p.penalty_weight = penalty_weight;
    p.redundancy_weight = alpha;
    p.relevance = relevance.iter().map(|r| r.abs()).collect();
    Ok(p)
}

fn relevance(x: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    x.column_iter()
        .map(|c| pearson(c.as_slice(), y).abs())
        .collect()
}

fn assemble(z: &DMatrix<f64>, relevance: Vec<f64>, k: usize, alpha: f64, penalty: f64) -> QuboProblem {
    let (m, n) = z.shape();
    let m = m as f64;
    let linear_penalty = penalty * (1.0 - 2.0 * k as f64);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let zi = z.column(i);
            let zero_i = zi.iter().all(|v| *v == 0.0);
            let mut row = Vec::with_capacity(n - i);
            row.push(-relevance[i] + linear_penalty);
            for j in i + 1..n {
                let r = if zero_i { 0.0 } else { (zi.dot(&z.column(j)) / m).abs().min(1.0) };
                row.push(alpha * r + 2.0 * penalty);
            }
            row
        })
        .collect();
    QuboProblem {
        n,
        upper: rows.into_iter().flatten().collect(),
        cardinality: k,
        penalty_weight: penalty,
        redundancy_weight: alpha,
        relevance,
    }
}

/// Geometric single-flip Metropolis schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t_start: 10.0,
            t_end: 0.01,
            sweeps: 2000,
            restarts: 8,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start > self.t_end && self.t_end > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need t_start > t_end > 0, got {} and {}",
                self.t_start, self.t_end
            )));
        }
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::InvalidInput("sweeps and restarts must be >= 1".into()));
        }
        Ok(())
    }

    fn temperature(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.t_end;
        }
        let frac = sweep as f64 / (self.sweeps - 1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(frac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboSolution {
    pub bits: Vec<u8>,
    pub energy: f64,
}

impl QuboSolution {
    pub fn selected(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i] != 0).collect()
    }
}

fn anneal_once(p: &QuboProblem, schedule: &AnnealSchedule, seed: u64) -> Vec<u8> {
    let n = p.n;
    let mut rng = rng_from(seed);
    let mut bits: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    // field[i] = q_ii + Σ_{j≠i} c_ij·x_j, so flipping i changes E by ±field[i]
    let mut field: Vec<f64> = (0..n)
        .map(|i| {
            p.get(i, i)
                + (0..n)
                    .filter(|&j| j != i && bits[j] != 0)
                    .map(|j| p.coupling(i, j))
                    .sum::<f64>()
        })
        .collect();
    let mut energy = qubo_energy(p, &bits).expect("length matches");
    let mut best = bits.clone();
    let mut best_energy = energy;

    for sweep in 0..schedule.sweeps {
        let t = schedule.temperature(sweep);
        for i in 0..n {
            let delta = if bits[i] == 0 { field[i] } else { -field[i] };
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp();
            if !accept {
                continue;
            }
            let sign = if bits[i] == 0 { 1.0 } else { -1.0 };
            bits[i] ^= 1;
            energy += delta;
            for j in 0..n {
                if j != i {
                    field[j] += sign * p.coupling(i, j);
                }
            }
            if energy < best_energy {
                best_energy = energy;
                best.copy_from_slice(&bits);
            }
        }
    }
    best
}

/// Simulated annealing with best-of-`restarts`; each restart owns an RNG
/// stream derived from `(seed, restart)`. The returned energy is recomputed
/// from the returned bits.
pub fn anneal(p: &QuboProblem, schedule: &AnnealSchedule) -> Result<QuboSolution> {
    schedule.validate()?;
    let runs: Vec<QuboSolution> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| {
            let bits = anneal_once(p, schedule, derive_seed(schedule.seed, &[r as u64]));
            let energy = qubo_energy(p, &bits).expect("length matches");
            QuboSolution { bits, energy }
        })
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, s| if s.energy < best.energy { s } else { best })
        .expect("restarts >= 1"))
}

/// Global minimum by enumeration. Ties go to the smallest integer
/// `Σ bits[i]·2^i`.
pub fn exhaustive_solve(p: &QuboProblem) -> Result<QuboSolution> {
    let n = p.n;
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooManyVariables {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << 12;
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut selected = Vec::with_capacity(n);
            let mut best = (f64::INFINITY, u64::MAX);
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                selected.clear();
                selected.extend((0..n).filter(|&i| mask >> i & 1 == 1));
                let e = energy_of_selected(p, &selected);
                if e < best.0 {
                    best = (e, mask);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let bits = (0..n).map(|i| (best.1 >> i & 1) as u8).collect();
    Ok(QuboSolution {
        bits,
        energy: best.0,
    })
}

/// Builds the default QUBO, anneals it and repairs the cardinality: surplus
/// picks are dropped and shortfalls padded, both by relevance.
pub fn qubo_select_k(
    x: &DMatrix<f64>,
    y: &[f64],
    k: usize,
    schedule: &AnnealSchedule,
) -> Result<FeatureSelection> {
    let problem = build_qubo_default(x, y, k)?;
    let solution = anneal(&problem, schedule)?;
    let rel = &problem.relevance;
    let by_relevance = |mut idx: Vec<usize>| {
        idx.sort_by(|&a, &b| rel[b].total_cmp(&rel[a]).then(a.cmp(&b)));
        idx
    };
    let selected = by_relevance(solution.selected());
    let annealed_count = selected.len();
    let mut chosen: Vec<usize> = selected.into_iter().take(k).collect();
    if chosen.len() < k {
        let rest = by_relevance((0..problem.n()).filter(|i| solution.bits[*i] == 0).collect());
        chosen.extend(rest.into_iter().take(k - chosen.len()));
    }
    let scored = chosen.iter().map(|&i| (i, rel[i])).collect();
    let mut sel = FeatureSelection::from_scored(scored, SelectionMethod::Qubo, k);
    sel.parameters.insert("alpha".into(), json!(problem.redundancy_weight));
    sel.parameters.insert("penalty_weight".into(), json!(problem.penalty_weight));
    sel.parameters.insert("energy".into(), json!(solution.energy));
    sel.parameters.insert("annealed_count".into(), json!(annealed_count));
    sel.parameters.insert("schedule".into(), serde_json::to_value(schedule)?);
    Ok(sel)
}
