//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Set `EQA_GOLUB_DIR` to a directory holding `data_set_ALL_AML_train.csv`,
//! `data_set_ALL_AML_independent.csv` and `actual.csv` to run the end-to-end
//! check on the real leukemia data; otherwise it runs on a Golub-shaped
//! synthetic surrogate and the real-data F1 threshold is reported as NOT RUN.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;

use eqa::data::{load_expression_csv, quantile_normalize, CsvFormat, ExpressionDataset};
use eqa::feature_select::{
    anneal, build_qubo_default, exhaustive_solve, lambda_max, lasso_fit, lasso_select_k, qubo_energy, standardize_columns,
    AnnealSchedule,
};
use eqa::kernels::{linear_gram, quantum_gram, KernelKind, KernelMatrix};
use eqa::metrics::{balanced_accuracy, f1_score, geometric_difference, tri_surface, MetricSurface};
use eqa::qsim::{build_feature_map, estimate_resources, simulate, FeatureMapKind};
use eqa::svm::{dual_objective, predict, smo_train, DEFAULT_C, DEFAULT_TOL};
use eqa::sweep::{export_result, run_sweep, SweepConfig, ExportFormat};
use eqa::synthetic::{generate, SyntheticSpec};

enum Status {
    Pass,
    Fail,
    NotRun,
}

struct Report {
    status: Status,
    details: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Self {
            status: Status::Pass,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(format!("ok    {what}"));
        } else {
            self.status = Status::Fail;
            self.details.push(format!("FAIL  {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(format!("      {}", what.into()));
    }
}

fn timed(limit: Duration, r: &mut Report, start: Instant) {
    let t = start.elapsed();
    r.check(t < limit, format!("runtime {:.3} s < {:.0} s", t.as_secs_f64(), limit.as_secs_f64()));
}

// ---------------------------------------------------------------------------

fn resource_tables() -> Report {
    let mut r = Report::new();
    let start = Instant::now();
    let table_i = [[5, 10, 15, 20], [8, 16, 24, 32], [11, 19, 27, 35], [14, 22, 30, 38], [17, 25, 33, 41]];
    let mut depth_hits = 0;
    for (row, n) in (2..=6).enumerate() {
        for (col, reps) in (1..=4).enumerate() {
            let e = estimate_resources(FeatureMapKind::Zz, n, reps).unwrap();
            if e.depth == table_i[row][col] {
                depth_hits += 1;
            } else {
                r.note(format!("zz n={n} r={reps}: depth {} expected {}", e.depth, table_i[row][col]));
            }
        }
    }
    r.check(depth_hits == 20, format!("{depth_hits}/20 zz depth values match the expected depth table"));

    let mut count_misses = Vec::new();
    for n in 1..=8usize {
        for reps in 1..=4usize {
            if n >= 2 {
                let e = estimate_resources(FeatureMapKind::Zz, n, reps).unwrap();
                if (e.h_count, e.p_count, e.cx_count) != (n * reps, reps * (2 * n - 1), 2 * (n - 1) * reps) {
                    count_misses.push(format!("zz n={n} r={reps}"));
                }
            }
            let e = estimate_resources(FeatureMapKind::PauliZ, n, reps).unwrap();
            if (e.h_count, e.p_count, e.cx_count, e.depth) != (n * reps, n * reps, 0, 2 * reps) {
                count_misses.push(format!("pauli_z n={n} r={reps}"));
            }
        }
    }
    r.check(
        count_misses.is_empty(),
        format!("gate counts exact for zz n=2..8 and pauli_z n=1..8, r=1..4 (misses: {count_misses:?})"),
    );
    r.check(
        estimate_resources(FeatureMapKind::Zz, 1, 1).is_err(),
        "zz with one qubit is rejected (no entangling pair)",
    );
    timed(Duration::from_secs(1), &mut r, start);
    r
}

fn simulator_oracle() -> Report {
    let mut r = Report::new();
    let start = Instant::now();
    let mut rng = common::rng(0x5107);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let kind = if rng.random::<bool>() { FeatureMapKind::Zz } else { FeatureMapKind::PauliZ };
        let n = match kind {
            FeatureMapKind::Zz => rng.random_range(2..=3),
            FeatureMapKind::PauliZ => rng.random_range(1..=3),
        };
        let reps = rng.random_range(1..=3);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
        let circuit = build_feature_map(kind, &x, reps).unwrap();
        let got = simulate(&circuit).unwrap();
        let want = common::oracle_state(&circuit);
        for (a, b) in got.amplitudes().iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    r.check(worst < 1e-10, format!("200 circuits, max amplitude error {worst:.2e} < 1e-10"));
    timed(Duration::from_secs(10), &mut r, start);
    r
}

fn kernel_properties() -> Report {
    let mut r = Report::new();
    let mut rng = common::rng(0xC0DE);
    let (mut diag, mut asym, mut range, mut min_eig) = (0.0f64, 0usize, 0usize, f64::INFINITY);
    for _ in 0..50 {
        let m = rng.random_range(2..=8);
        let kind = if rng.random::<bool>() { FeatureMapKind::Zz } else { FeatureMapKind::PauliZ };
        let n = match kind {
            FeatureMapKind::Zz => rng.random_range(2..=4),
            FeatureMapKind::PauliZ => rng.random_range(1..=4),
        };
        let reps = rng.random_range(1..=3);
        let x = common::random_matrix(&mut rng, m, n, 0.0, std::f64::consts::PI);
        let k = quantum_gram(&x, kind, reps).unwrap();
        for i in 0..m {
            diag = diag.max((k.values[(i, i)] - 1.0).abs());
            for j in 0..m {
                let v = k.values[(i, j)];
                asym += usize::from(v != k.values[(j, i)]);
                range += usize::from(!(0.0..=1.0 + 1e-10).contains(&v));
            }
        }
        min_eig = min_eig.min(k.min_eigenvalue().unwrap());
    }
    r.check(diag <= 1e-10, format!("unit diagonal, max deviation {diag:.2e}"));
    r.check(asym == 0, format!("exact symmetry ({asym} asymmetric entries)"));
    r.check(range == 0, format!("entries in [0, 1+1e-10] ({range} outside)"));
    r.check(min_eig >= -1e-8, format!("min eigenvalue {min_eig:.2e} >= -1e-8"));

    let xs: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
    let k = quantum_gram(&DMatrix::from_column_slice(12, 1, &xs), FeatureMapKind::PauliZ, 1).unwrap();
    let mut worst = 0.0f64;
    for i in 0..12 {
        for j in 0..12 {
            worst = worst.max((k.values[(i, j)] - (xs[i] - xs[j]).cos().powi(2)).abs());
        }
    }
    r.check(worst <= 1e-10, format!("1-qubit pauli_z r=1 equals cos²(xi − xj), max error {worst:.2e}"));
    r
}

fn qubo_solver() -> Report {
    let mut r = Report::new();
    let mut rng = common::rng(0x0B0E);
    let (mut hits, mut exact_energy) = (0, 0);
    for instance in 0..100u64 {
        let (x, y) = common::structured_selection_problem(&mut rng, 40, 12);
        let k = rng.random_range(2..=6);
        let q = build_qubo_default(&x, &y, k).unwrap();
        let best = exhaustive_solve(&q).unwrap();
        let oracle = common::qubo_bruteforce(&q.to_dense());
        assert!((oracle.1 - best.energy).abs() <= 1e-9 * oracle.1.abs().max(1.0), "exhaustive solver disagrees with dense oracle");
        let sol = anneal(&q, &AnnealSchedule { seed: instance, ..Default::default() }).unwrap();
        if (sol.energy - best.energy).abs() <= 1e-9 * best.energy.abs().max(1.0) {
            hits += 1;
        }
        if qubo_energy(&q, &sol.bits).unwrap() == sol.energy {
            exact_energy += 1;
        }
    }
    r.check(hits >= 95, format!("anneal reached the exhaustive optimum on {hits}/100 instances (need >= 95)"));
    r.check(exact_energy == 100, format!("qubo_energy(bits) == returned energy exactly on {exact_energy}/100"));
    r
}

fn lasso() -> Report {
    let mut r = Report::new();
    let mut rng = common::rng(0x1A55);
    let mut worst_kkt = 0.0f64;
    for _ in 0..50 {
        let m = rng.random_range(10..60);
        let p = rng.random_range(2..30);
        let x = common::random_matrix(&mut rng, m, p, -2.0, 2.0);
        let beta_true: Vec<f64> = (0..p).map(|j| if j % 3 == 0 { rng.random_range(-2.0..2.0) } else { 0.0 }).collect();
        let y: Vec<f64> = (0..m)
            .map(|i| (0..p).map(|j| x[(i, j)] * beta_true[j]).sum::<f64>() + rng.random_range(-0.5..0.5))
            .collect();
        let z = standardize_columns(&x);
        let lambda = rng.random_range(0.01..1.0) * lambda_max(&z, &y);
        let beta = lasso_fit(&x, &y, lambda).unwrap();
        worst_kkt = worst_kkt.max(common::lasso_kkt_violation(&z, &y, &beta, lambda));
    }
    r.check(worst_kkt <= 1e-6, format!("KKT on 50 random problems, worst violation {worst_kkt:.2e} <= 1e-6"));

    let mut worst_ls = 0.0f64;
    for _ in 0..20 {
        let m = rng.random_range(20..50);
        let p = rng.random_range(2..8);
        let x = common::random_matrix(&mut rng, m, p, -1.0, 1.0);
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = standardize_columns(&x);
        let beta = lasso_fit(&x, &y, 0.0).unwrap();
        worst_ls = worst_ls.max((beta - common::least_squares(&z, &y)).amax());
    }
    r.check(worst_ls <= 1e-6, format!("lambda = 0 equals least squares, worst error {worst_ls:.2e} <= 1e-6"));

    let (m, p) = (32, 12);
    let z = common::orthogonal_design(m, p);
    let coef: Vec<f64> = (0..p).map(|j| (j as f64 + 1.0) * if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let y: Vec<f64> = (0..m).map(|i| (0..p).map(|j| z[(i, j)] * coef[j]).sum()).collect();
    let mut exact = Vec::new();
    for k in 1..p {
        let sel = lasso_select_k(&z, &y, k).unwrap();
        let want: Vec<usize> = (p - k..p).rev().collect();
        if sel.len() == k && sel.warning.is_none() && sel.indices == want {
            exact.push(k);
        }
    }
    r.check(
        exact.len() == p - 1,
        format!("orthogonal design: exact k (largest |β| first) for {}/{} values of k", exact.len(), p - 1),
    );
    r
}

fn svm() -> Report {
    let mut r = Report::new();
    let mut rng = common::rng(0x5A4);
    let mut worst = 0.0f64;
    let mut count = 0;
    for trial in 0..300 {
        let m = rng.random_range(2..=6);
        let mut y: Vec<f64> = (0..m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let kv = match trial % 3 {
            0 => {
                let dim = rng.random_range(1..4);
                linear_gram(&common::random_matrix(&mut rng, m, dim, -2.0, 2.0)).values
            }
            1 => quantum_gram(&common::random_matrix(&mut rng, m, 2, 0.0, 3.0), FeatureMapKind::Zz, 2).unwrap().values,
            _ => common::random_spd(&mut rng, m, 0.01),
        };
        let c = [0.1, 1.0, 10.0][rng.random_range(0..3)];
        let k = KernelMatrix::new(kv.clone(), KernelKind::Precomputed);
        let model = smo_train(&k, &y, c, DEFAULT_TOL).unwrap();
        let ours = dual_objective(&k, &y, &model.alphas);
        let oracle = common::svm_dual_oracle(&kv, &y, c);
        worst = worst.max((ours - oracle).abs());
        count += 1;
    }
    r.check(worst <= 1e-4, format!("{count} instances with <= 6 points, worst |W − W_oracle| {worst:.2e} <= 1e-4"));

    let k = linear_gram(&DMatrix::from_column_slice(2, 1, &[-1.0, 1.0]));
    let model = smo_train(&k, &[-1.0, 1.0], DEFAULT_C, DEFAULT_TOL).unwrap();
    let ok = (model.alphas[0] - 0.5).abs() < 1e-12 && (model.alphas[1] - 0.5).abs() < 1e-12 && model.bias.abs() < 1e-12;
    r.check(ok, format!("two-point example: alphas {:?}, bias {}", model.alphas, model.bias));
    let cross = linear_kernel_row(&[2.0], &[-1.0, 1.0]);
    let (labels, dec) = predict(&model, &cross).unwrap();
    r.check(labels == [1.0] && (dec[0] - 2.0).abs() < 1e-12, format!("test x=2 → label {:?}, decision {:?}", labels, dec));
    r
}

fn linear_kernel_row(test: &[f64], train: &[f64]) -> KernelMatrix {
    let a = DMatrix::from_column_slice(test.len(), 1, test);
    let b = DMatrix::from_column_slice(train.len(), 1, train);
    eqa::kernels::linear_kernel(&a, &b).unwrap()
}

fn metrics() -> Report {
    let mut r = Report::new();
    let mut rng = common::rng(0x3E7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let m = rng.random_range(2..10);
        let k = KernelMatrix::new(common::random_spd(&mut rng, m, 0.5), KernelKind::Precomputed);
        worst = worst.max((geometric_difference(&k, &k, 1e-7).unwrap() - 1.0).abs());
    }
    r.check(worst <= 1e-3, format!("g(K, K) = 1 on 20 kernels, worst deviation {worst:.2e}"));

    let mut worst_oracle = 0.0f64;
    for _ in 0..20 {
        let kc = common::random_spd(&mut rng, 4, 0.2);
        let kq = common::random_spd(&mut rng, 4, 0.2);
        let g = geometric_difference(
            &KernelMatrix::new(kc.clone(), KernelKind::Linear),
            &KernelMatrix::new(kq.clone(), KernelKind::Precomputed),
            1e-7,
        )
        .unwrap();
        let o = common::geometric_difference_oracle(&kc, &kq, 1e-7);
        worst_oracle = worst_oracle.max((g - o).abs());
    }
    r.check(worst_oracle <= 1e-8, format!("random 4×4 pairs vs independent oracle, worst {worst_oracle:.2e}"));

    let flat = MetricSurface::new("f1", "k", vec![2, 8, 14], vec![25, 41, 57], vec![vec![0.7; 3]; 3]).unwrap();
    let flat_tri = tri_surface(&flat).unwrap();
    r.check(flat_tri.values.iter().flatten().all(|v| *v == Some(0.0)), "constant surface → TRI 0");
    let mut spike = vec![vec![0.0; 3]; 3];
    spike[1][1] = 1.0;
    let tri = tri_surface(&MetricSurface::new("f1", "k", vec![2, 8, 14], vec![25, 41, 57], spike).unwrap()).unwrap();
    let center = tri.get(1, 1).unwrap();
    let corner = tri.get(0, 0).unwrap();
    r.check(
        (center - 8f64.sqrt()).abs() <= 1e-12 && (corner - 1.0).abs() <= 1e-12,
        format!("3×3 spike: center {center}, corner {corner}"),
    );

    // TP=2 FP=1 FN=1 TN=1
    let t = [1, 1, 1, 0, 0];
    let p = [1, 1, 0, 1, 0];
    let f1 = f1_score(&t, &p, 1).unwrap();
    r.check(f1 == 2.0 / 3.0, format!("F1 with TP=2, FP=1, FN=1 = {f1}"));
    r.check(f1_score(&[0, 0], &[0, 0], 1).unwrap() == 0.0, "F1 with no positives = 0");
    r.check(f1_score(&[1, 0, 1], &[1, 0, 1], 1).unwrap() == 1.0, "F1 of perfect predictions = 1");
    // 3/4 positives found, 1/2 negatives correct
    let ba = balanced_accuracy(&[1, 1, 1, 1, 0, 0], &[1, 1, 1, 0, 0, 1]).unwrap();
    r.check(ba == 0.625, format!("balanced accuracy (0.75 + 0.5)/2 = {ba}"));
    r.check(balanced_accuracy(&[1, 0, 1, 0], &[1, 1, 1, 1]).unwrap() == 0.5, "constant positive predictor → 0.5");
    r.check(balanced_accuracy(&[1, 1], &[1, 1]).is_err(), "single-class truth is rejected");
    r
}

// ---------------------------------------------------------------------------

fn golub_dir() -> Option<PathBuf> {
    std::env::var_os("EQA_GOLUB_DIR").map(PathBuf::from)
}

fn load_golub(dir: &Path) -> eqa::Result<ExpressionDataset> {
    let labels = dir.join("actual.csv");
    let train = load_expression_csv(dir.join("data_set_ALL_AML_train.csv"), CsvFormat::GolubWide { labels: &labels })?;
    let test = load_expression_csv(
        dir.join("data_set_ALL_AML_independent.csv"),
        CsvFormat::GolubWide { labels: &labels },
    )?;
    train.concat(&test)
}

fn end_to_end_checks(r: &mut Report, ds: &ExpressionDataset, label: &str) -> Option<f64> {
    let ds = ds.with_values(quantile_normalize(ds.values()).unwrap()).unwrap();
    let cfg = SweepConfig::default();
    let start = Instant::now();
    let res = match run_sweep(&ds, &cfg) {
        Ok(res) => res,
        Err(e) => {
            r.check(false, format!("{label}: sweep failed: {e}"));
            return None;
        }
    };
    let elapsed = start.elapsed();
    r.check(elapsed < Duration::from_secs(600), format!("{label}: default grid sweep in {:.1} s < 600 s", elapsed.as_secs_f64()));
    let mut cells = 0;
    let mut in_range = true;
    for s in &res.surfaces {
        for v in s.values.iter().flatten() {
            cells += usize::from(v.is_some());
            in_range &= v.is_some_and(|v| (0.0..=1.0).contains(&v));
        }
    }
    r.check(
        res.surfaces.len() == 4 && cells == 36 && in_range,
        format!("{label}: four 3×3 score surfaces, {cells}/36 cells scored, all in [0, 1]"),
    );
    r.check(res.provenance.audit.verify().is_ok(), format!("{label}: leakage audit passes"));
    let by_f: BTreeMap<usize, &Vec<usize>> =
        res.provenance.cells.iter().map(|c| (c.feature_count, &c.feature_indices)).collect();
    let sets: Vec<&Vec<usize>> = by_f.values().copied().collect();
    let nested = sets.windows(2).all(|w| w[1].starts_with(w[0]));
    r.check(nested, format!("{label}: feature subsets nested 2 ⊂ 8 ⊂ 14"));
    let g_ok = res.geometric_diff.values.iter().flatten().all(|v| v.is_some_and(|g| g >= 0.0));
    r.check(g_ok && res.ptri.len() == 6, format!("{label}: geometric difference >= 0 and 6 ptri surfaces"));
    let dir = tempfile::tempdir().unwrap();
    let manifest = export_result(&res, dir.path(), &[ExportFormat::Csv, ExportFormat::Json]).unwrap();
    r.check(manifest.files.len() >= 9, format!("{label}: manifest lists {} files", manifest.files.len()));
    res.surface("f1", "classical").and_then(|s| s.get(2, 0))
}

fn end_to_end() -> Report {
    let mut r = Report::new();
    match golub_dir() {
        Some(dir) => match load_golub(&dir) {
            Ok(ds) => {
                r.note(format!("Golub data: {} samples × {} genes from {}", ds.n_samples(), ds.n_features(), dir.display()));
                let f1 = end_to_end_checks(&mut r, &ds, "golub");
                r.check(
                    f1.is_some_and(|f| f >= 0.75),
                    format!("golub: classical linear F1 at (14, 25) = {f1:?} >= 0.75"),
                );
            }
            Err(e) => r.check(false, format!("EQA_GOLUB_DIR set but loading failed: {e}")),
        },
        None => {
            let ds = generate(&SyntheticSpec::golub_like(7129, 2024)).unwrap();
            let f1 = end_to_end_checks(&mut r, &ds, "surrogate");
            r.note(format!("surrogate: classical linear F1 at (14, 25) = {f1:?} (informational)"));
            r.note("Golub data not found (set EQA_GOLUB_DIR); real-data F1 >= 0.75 threshold NOT RUN");
            if matches!(r.status, Status::Pass) {
                r.status = Status::NotRun;
            }
        }
    }
    r
}

// ---------------------------------------------------------------------------

fn eqa(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_eqa")).args(args).output().expect("run eqa");
    (out.status.success(), out.stdout)
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.clone(), std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn determinism() -> Report {
    let mut r = Report::new();
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let spec = SyntheticSpec {
        n_samples: 40,
        n_features: 30,
        n_informative: 6,
        n_positive: 15,
        effect_size: 2.0,
        seed: 11,
    };
    let ds = generate(&spec).unwrap();
    let split = eqa::data::split_indices(ds.labels(), 0.25, 3).unwrap();
    ds.select_rows(&split.train).save_tidy_csv(d.join("raw_train.csv")).unwrap();
    ds.select_rows(&split.test).save_tidy_csv(d.join("raw_test.csv")).unwrap();
    ds.save_tidy_csv(d.join("raw.csv")).unwrap();
    std::fs::write(
        d.join("sweep.toml"),
        "feature_counts = [2, 3]\nsample_counts = [10, 20]\nk_pool = 4\nselection_method = \"qubo\"\n\n[anneal]\nsweeps = 300\nrestarts = 2\n",
    )
    .unwrap();
    let s = |p: &str| d.join(p).to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec!["preprocess".into(), "--input".into(), s("raw.csv"), "--output".into(), s("norm.csv")],
        vec!["preprocess".into(), "--input".into(), s("raw_train.csv"), "--output".into(), s("train.csv"), "--no-quantile".into()],
        vec!["preprocess".into(), "--input".into(), s("raw_test.csv"), "--output".into(), s("test.csv"), "--no-quantile".into()],
        vec!["select".into(), "--input".into(), s("train.csv"), "--method".into(), "lasso".into(), "--k".into(), "4".into(), "--output".into(), s("lasso.json")],
        vec!["select".into(), "--input".into(), s("train.csv"), "--method".into(), "qubo".into(), "--k".into(), "4".into(), "--seed".into(), "9".into(), "--sweeps".into(), "300".into(), "--output".into(), s("qubo.json")],
        vec!["kernel".into(), "--input".into(), s("train.csv"), "--map".into(), "zz".into(), "--selection".into(), s("qubo.json"), "--scale".into(), "--output".into(), s("kq_train.csv")],
        vec!["kernel".into(), "--input".into(), s("test.csv"), "--against".into(), s("train.csv"), "--map".into(), "zz".into(), "--selection".into(), s("qubo.json"), "--scale".into(), "--output".into(), s("kq_test.csv")],
        vec!["kernel".into(), "--input".into(), s("train.csv"), "--map".into(), "linear".into(), "--selection".into(), s("qubo.json"), "--scale".into(), "--output".into(), s("kc_train.csv")],
        vec!["train-eval".into(), "--train-kernel".into(), s("kq_train.csv"), "--test-kernel".into(), s("kq_test.csv"), "--train-data".into(), s("train.csv"), "--test-data".into(), s("test.csv"), "--output".into(), s("metrics.json")],
        vec!["geodiff".into(), s("kc_train.csv"), s("kq_train.csv"), "--output".into(), s("geodiff.json")],
        vec!["sweep".into(), "--config".into(), s("sweep.toml"), "--data".into(), s("norm.csv"), "--out".into(), s("run"), "--seed".into(), "5".into()],
        vec!["ptri".into(), s("run/f1_classical.csv"), "--quantum".into(), s("run/f1_quantum.csv"), "--out-dir".into(), s("ptri")],
    ];
    let run_all = || -> (bool, Vec<Vec<u8>>) {
        let mut ok = true;
        let mut stdouts = Vec::new();
        for c in &commands {
            let args: Vec<&str> = c.iter().map(String::as_str).collect();
            let (success, stdout) = eqa(&args);
            ok &= success;
            stdouts.push(stdout);
        }
        (ok, stdouts)
    };
    let (ok1, out1) = run_all();
    let first = snapshot(d);
    let (ok2, out2) = run_all();
    let second = snapshot(d);
    r.check(ok1 && ok2, format!("{} seeded commands exit 0 on both runs", commands.len()));
    let differing: Vec<String> = first
        .iter()
        .filter(|(p, b)| second.get(*p) != Some(b))
        .map(|(p, _)| p.strip_prefix(d).unwrap().display().to_string())
        .collect();
    r.check(
        differing.is_empty() && first.len() == second.len(),
        format!("{} output files byte-identical across runs (differing: {differing:?})", first.len()),
    );
    r.check(out1 == out2, "stdout byte-identical across runs");

    let (ok, a) = eqa(&["resources", "--map", "zz", "--table"]);
    let (_, b) = eqa(&["resources", "--map", "zz", "--table"]);
    r.check(ok && a == b, "resources table output identical across runs");
    r
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: Vec<(&str, fn() -> Report)> = vec![
        ("resource tables", resource_tables),
        ("simulator oracle", simulator_oracle),
        ("kernel properties", kernel_properties),
        ("qubo solver", qubo_solver),
        ("lasso", lasso),
        ("svm", svm),
        ("metrics", metrics),
        ("end-to-end", end_to_end),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    println!("\nacceptance criteria");
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let report = f();
        let tag = match report.status {
            Status::Pass => "PASS   ",
            Status::Fail => {
                failed += 1;
                "FAIL   "
            }
            Status::NotRun => "NOT RUN",
        };
        println!("{tag} {name} ({:.2} s)", start.elapsed().as_secs_f64());
        for d in &report.details {
            println!("          {d}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
