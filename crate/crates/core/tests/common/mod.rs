//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use eqa::qsim::{Circuit, Gate};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

// ---------------------------------------------------------------------------
// Dense unitary oracle

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn eye2() -> CMat {
    CMat::identity(2, 2)
}

/// `M_{n-1} ⊗ … ⊗ M_0`: qubit 0 is the least significant index bit.
fn kron_all(ops: &[CMat]) -> CMat {
    let mut out = CMat::from_element(1, 1, c(1.0));
    for op in ops.iter().rev() {
        out = out.kronecker(op);
    }
    out
}

fn single(n: usize, q: usize, op: CMat) -> CMat {
    let ops: Vec<CMat> = (0..n).map(|k| if k == q { op.clone() } else { eye2() }).collect();
    kron_all(&ops)
}

pub fn gate_unitary(n: usize, gate: &Gate) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        Gate::H(q) => single(n, q, CMat::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])),
        Gate::P(q, theta) => single(
            n,
            q,
            CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), Complex64::from_polar(1.0, theta)]),
        ),
        Gate::Cx { control, target } => {
            let p0 = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
            let p1 = CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
            let x = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
            let a: Vec<CMat> = (0..n).map(|k| if k == control { p0.clone() } else { eye2() }).collect();
            let b: Vec<CMat> = (0..n)
                .map(|k| {
                    if k == control {
                        p1.clone()
                    } else if k == target {
                        x.clone()
                    } else {
                        eye2()
                    }
                })
                .collect();
            kron_all(&a) + kron_all(&b)
        }
    }
}

pub fn circuit_unitary(circuit: &Circuit) -> CMat {
    let n = circuit.n_qubits();
    let dim = 1usize << n;
    circuit
        .gates()
        .iter()
        .fold(CMat::identity(dim, dim), |u, g| gate_unitary(n, g) * u)
}

/// Final state from |0…0⟩ by dense matrix multiplication.
pub fn oracle_state(circuit: &Circuit) -> Vec<Complex64> {
    let u = circuit_unitary(circuit);
    u.column(0).iter().copied().collect()
}

// ---------------------------------------------------------------------------
// SVM dual oracle

/// Maximum of the soft-margin dual by enumerating every assignment of each
/// `α_i` to {0, c, free}. On each face the free block solves the KKT system
/// `[Q_FF y_F; y_Fᵀ 0][α_F; μ] = [1 − Q_FB α_B; −y_Bᵀ α_B]`; feasible
/// stationary points are scored and the best kept. Exponential in `m`.
pub fn svm_dual_oracle(k: &DMatrix<f64>, y: &[f64], c: f64) -> f64 {
    let m = y.len();
    assert!(m <= 10, "brute force is 3^m");
    let q = DMatrix::from_fn(m, m, |i, j| y[i] * y[j] * k[(i, j)]);
    let objective = |a: &DVector<f64>| a.sum() - 0.5 * (a.transpose() * &q * a)[(0, 0)];
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(m as u32) {
        // 0 → α = 0, 1 → α = c, 2 → free
        let state: Vec<usize> = (0..m).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let free: Vec<usize> = (0..m).filter(|&i| state[i] == 2).collect();
        let mut a = DVector::from_iterator(m, state.iter().map(|&s| if s == 1 { c } else { 0.0 }));
        if !free.is_empty() {
            let f = free.len();
            let mut lhs = DMatrix::zeros(f + 1, f + 1);
            let mut rhs = DVector::zeros(f + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    lhs[(r, s)] = q[(i, j)];
                }
                lhs[(r, f)] = y[i];
                lhs[(f, r)] = y[i];
                rhs[r] = 1.0 - (0..m).filter(|j| state[*j] != 2).map(|j| q[(i, j)] * a[j]).sum::<f64>();
            }
            rhs[f] = -(0..m).filter(|j| state[*j] != 2).map(|j| y[j] * a[j]).sum::<f64>();
            let Ok(sol) = lhs.clone().svd(true, true).solve(&rhs, 1e-12) else {
                continue;
            };
            if (&lhs * &sol - &rhs).amax() > 1e-9 {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                a[i] = sol[r];
            }
        }
        let feasible = a.iter().all(|&v| v >= -1e-10 && v <= c + 1e-10)
            && a.iter().zip(y).map(|(v, t)| v * t).sum::<f64>().abs() <= 1e-9;
        if feasible {
            best = best.max(objective(&a));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Linear algebra oracles

/// Denman–Beavers iteration for the principal square root of an SPD matrix.
pub fn sqrtm_denman_beavers(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = a.clone();
    let mut z = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..100 {
        let yi = y.clone().lu().try_inverse().expect("invertible");
        let zi = z.clone().lu().try_inverse().expect("invertible");
        let y_next = (&y + zi) * 0.5;
        let z_next = (&z + yi) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta < 1e-15 * y.norm() {
            break;
        }
    }
    y
}

/// Geometric difference from Denman–Beavers square roots, LU inversion and
/// the largest singular value.
pub fn geometric_difference_oracle(kc: &DMatrix<f64>, kq: &DMatrix<f64>, reg: f64) -> f64 {
    let m = kc.nrows() as f64;
    let kc = kc * (m / kc.trace());
    let kq = kq * (m / kq.trace());
    let sq = sqrtm_denman_beavers(&kq);
    let reg_c = &kc + DMatrix::identity(kc.nrows(), kc.ncols()) * reg;
    let inv = reg_c.lu().try_inverse().expect("invertible");
    let inner = &sq * inv * &sq;
    inner.singular_values().max().sqrt()
}

/// PSD test by Cholesky of `K + tol·I`.
pub fn is_psd(k: &DMatrix<f64>, tol: f64) -> bool {
    let shifted = k + DMatrix::identity(k.nrows(), k.ncols()) * tol;
    shifted.cholesky().is_some()
}

/// Random symmetric positive definite matrix `AAᵀ + shift·I`.
pub fn random_spd(rng: &mut ChaCha8Rng, m: usize, shift: f64) -> DMatrix<f64> {
    let a = random_matrix(rng, m, m, -1.0, 1.0);
    &a * a.transpose() + DMatrix::identity(m, m) * shift
}

// ---------------------------------------------------------------------------
// QUBO oracle

/// Minimum of `xᵀQx` over all bit strings of length `n`, by dense evaluation.
/// Ties resolve to the smallest integer with bit 0 as least significant.
pub fn qubo_bruteforce(q: &DMatrix<f64>) -> (Vec<u8>, f64) {
    let n = q.nrows();
    let mut best = (Vec::new(), f64::INFINITY);
    for code in 0u64..(1u64 << n) {
        let x = DVector::from_iterator(n, (0..n).map(|i| ((code >> i) & 1) as f64));
        let e = (x.transpose() * q * &x)[(0, 0)];
        if e < best.1 {
            best = ((0..n).map(|i| ((code >> i) & 1) as u8).collect(), e);
        }
    }
    best
}

/// Design matrix with relevance/redundancy structure: label-correlated columns
/// plus correlated copies and noise.
pub fn structured_selection_problem(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let y: Vec<f64> = (0..m).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
    let mut x = random_matrix(rng, m, n, -1.0, 1.0);
    for j in 0..n {
        let signal: f64 = rng.random_range(0.0..1.5);
        let source = rng.random_range(0..n);
        for i in 0..m {
            x[(i, j)] += signal * y[i];
            if j > source && j % 4 == 0 {
                x[(i, j)] += 0.8 * x[(i, source)];
            }
        }
    }
    (x, y)
}

// ---------------------------------------------------------------------------
// Lasso oracles

/// Largest violation of the lasso subgradient optimality conditions for
/// `(1/2m)‖y − Zβ‖² + λ‖β‖₁` on a standardized design `z`.
pub fn lasso_kkt_violation(z: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>, lambda: f64) -> f64 {
    let m = z.nrows() as f64;
    let yv = DVector::from_column_slice(y);
    let residual = yv - z * beta;
    let mut worst = 0.0f64;
    for j in 0..z.ncols() {
        let g = z.column(j).dot(&residual) / m;
        let v = if beta[j] == 0.0 {
            (g.abs() - lambda).max(0.0)
        } else {
            (g - lambda * beta[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Ordinary least squares through QR (no intercept; `z` columns are centered).
pub fn least_squares(z: &DMatrix<f64>, y: &[f64]) -> DVector<f64> {
    let qr = z.clone().qr();
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    qr.r().solve_upper_triangular(&qty).expect("full column rank")
}

/// Centered, orthogonal design whose columns have unit population variance.
/// `m` must be a power of two with `p < m`; built from a Sylvester Hadamard matrix.
pub fn orthogonal_design(m: usize, p: usize) -> DMatrix<f64> {
    assert!(m.is_power_of_two() && p < m);
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < m {
        let k = h.nrows();
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    // drop the constant first column so the rest are centered
    h.columns(1, p).into_owned()
}
