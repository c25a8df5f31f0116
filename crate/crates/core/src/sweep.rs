//! The (feature count × sample count) configuration-grid experiment.
//!
//! For each cell the pipeline is: take the top-`f` pooled features, subsample
//! `m` training rows, fit angle scaling on those rows, build linear and
//! quantum Gram matrices, train both SVMs and score them on the held-out test
//! split. Geometric difference is taken between the two training Grams, and
//! ruggedness surfaces are derived from the finished metric grids.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{apply_minmax, fit_angle_scaling, split_indices, subsample_indices, ExpressionDataset};
use crate::error::{Error, Result};
use crate::feature_select::{lasso_select_k, qubo_select_k, AnnealSchedule, FeatureSelection, SelectionMethod};
use crate::kernels::{linear_gram, linear_kernel, quantum_gram, quantum_kernel_matrix, KernelMatrix};
use crate::metrics::{balanced_accuracy, f1_score, geometric_difference, ptri_comparison, MetricSurface, DEFAULT_GEODIFF_REG};
use crate::qsim::{FeatureMapKind, DEFAULT_REPETITIONS};
use crate::rng::derive_seed;
use crate::svm::{predict, smo_train, DEFAULT_C, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub feature_counts: Vec<usize>,
    pub sample_counts: Vec<usize>,
    pub selection_method: SelectionMethod,
    pub map_kind: FeatureMapKind,
    pub repetitions: usize,
    pub svm_c: f64,
    pub svm_tol: f64,
    pub test_fraction: f64,
    pub seed: u64,
    /// Features selected once on the training split; cells use prefixes.
    pub k_pool: usize,
    pub geodiff_reg: f64,
    pub anneal: AnnealSchedule,
    /// Upper bound on concurrently evaluated cells; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Optional input/output locations used by the command-line front end.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            feature_counts: vec![2, 8, 14],
            sample_counts: vec![25, 41, 57],
            selection_method: SelectionMethod::Lasso,
            map_kind: FeatureMapKind::Zz,
            repetitions: DEFAULT_REPETITIONS,
            svm_c: DEFAULT_C,
            svm_tol: DEFAULT_TOL,
            test_fraction: 0.2,
            seed: 0,
            k_pool: 20,
            geodiff_reg: DEFAULT_GEODIFF_REG,
            anneal: AnnealSchedule::default(),
            jobs: None,
            data: None,
            output_dir: None,
        }
    }
}

impl SweepConfig {
    /// Reads TOML, or JSON when the file extension is `.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: SweepConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        // relative paths are resolved against the config file
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.data, &mut cfg.output_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.feature_counts.is_empty() || self.sample_counts.is_empty() {
            return bad("feature_counts and sample_counts must be non-empty".into());
        }
        if self.feature_counts.contains(&0) {
            return bad("feature counts must be >= 1".into());
        }
        if let Some(&max) = self.feature_counts.iter().max() {
            if max > self.k_pool {
                return bad(format!("feature count {max} exceeds k_pool {}", self.k_pool));
            }
        }
        if self.repetitions == 0 {
            return bad("repetitions must be >= 1".into());
        }
        if !(self.svm_c > 0.0 && self.svm_tol > 0.0) {
            return bad("svm_c and svm_tol must be positive".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} not in (0, 1)", self.test_fraction));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1".into());
        }
        self.anneal.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScores {
    pub f1_classical: f64,
    pub f1_quantum: f64,
    pub balanced_accuracy_classical: f64,
    pub balanced_accuracy_quantum: f64,
    pub geometric_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok(CellScores),
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub feature_count: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub feature_indices: Vec<usize>,
    pub feature_ids: Vec<String>,
    pub outcome: CellOutcome,
}

/// Dataset row indices touched by each stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRows {
    pub feature_count: usize,
    pub sample_count: usize,
    pub subsample: Vec<usize>,
    pub scaling_fit: Vec<usize>,
    pub gram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageAudit {
    pub test_rows: Vec<usize>,
    pub selection_rows: Vec<usize>,
    pub cells: Vec<CellRows>,
}

impl LeakageAudit {
    /// Errors if any test row was used for selection, subsampling, scaling
    /// or a training Gram.
    pub fn verify(&self) -> Result<()> {
        let test: BTreeSet<usize> = self.test_rows.iter().copied().collect();
        let check = |stage: &str, rows: &[usize]| match rows.iter().find(|r| test.contains(r)) {
            Some(r) => Err(Error::InvalidInput(format!("test row {r} leaked into {stage}"))),
            None => Ok(()),
        };
        check("feature selection", &self.selection_rows)?;
        for cell in &self.cells {
            let stage = format!("cell ({}, {})", cell.feature_count, cell.sample_count);
            check(&format!("{stage} subsample"), &cell.subsample)?;
            check(&format!("{stage} scaling fit"), &cell.scaling_fit)?;
            check(&format!("{stage} Gram"), &cell.gram)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: SweepConfig,
    pub n_train: usize,
    pub n_test: usize,
    pub pool: FeatureSelection,
    pub cells: Vec<CellRecord>,
    pub audit: LeakageAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// F1 and balanced accuracy for the classical and quantum kernels.
    pub surfaces: Vec<MetricSurface>,
    pub geometric_diff: MetricSurface,
    /// Classical, quantum and difference ruggedness for each metric.
    pub ptri: Vec<MetricSurface>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ptri_skipped: Option<String>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn surface(&self, metric: &str, kernel: &str) -> Option<&MetricSurface> {
        self.surfaces
            .iter()
            .find(|s| s.metric_name == metric && s.kernel_name == kernel)
    }
}

pub fn select_pool(
    train: &ExpressionDataset,
    method: SelectionMethod,
    k: usize,
    schedule: &AnnealSchedule,
) -> Result<FeatureSelection> {
    let y = train.signed_labels();
    let sel = match method {
        SelectionMethod::Lasso => lasso_select_k(train.values(), &y, k)?,
        SelectionMethod::Qubo => qubo_select_k(train.values(), &y, k, schedule)?,
    };
    Ok(sel.with_ids(train.feature_ids()))
}

struct CellContext<'a> {
    train: &'a ExpressionDataset,
    test: &'a ExpressionDataset,
    train_rows: &'a [usize],
    cfg: &'a SweepConfig,
}

fn labels01(signed: &[f64]) -> Vec<u8> {
    signed.iter().map(|&v| u8::from(v > 0.0)).collect()
}

fn evaluate_cell(
    ctx: &CellContext<'_>,
    features: &[usize],
    m: usize,
    seed: u64,
) -> (CellRows, std::result::Result<CellScores, String>) {
    let f = features.len();
    let mut rows = CellRows {
        feature_count: f,
        sample_count: m,
        subsample: Vec::new(),
        scaling_fit: Vec::new(),
        gram: Vec::new(),
    };
    let local = match subsample_indices(ctx.train.labels(), m, seed) {
        Ok(r) => r,
        Err(e) => return (rows, Err(e.to_string())),
    };
    let global: Vec<usize> = local.iter().map(|&i| ctx.train_rows[i]).collect();
    rows.subsample = global.clone();
    rows.scaling_fit = global.clone();
    rows.gram = global;

    let scores = (|| -> Result<CellScores> {
        let cell_train = ctx.train.select_rows(&local).select_features(features);
        let cell_test = ctx.test.select_features(features);
        let params = fit_angle_scaling(cell_train.values())?;
        let xtr = apply_minmax(cell_train.values(), &params)?;
        let xte = apply_minmax(cell_test.values(), &params)?;
        let ytr = cell_train.signed_labels();
        let truth = cell_test.labels();
        let cfg = ctx.cfg;

        let k_lin = linear_gram(&xtr);
        let k_q = quantum_gram(&xtr, cfg.map_kind, cfg.repetitions)?;
        let score = |k_train: &KernelMatrix, k_cross: KernelMatrix| -> Result<(f64, f64)> {
            let model = smo_train(k_train, &ytr, cfg.svm_c, cfg.svm_tol)?;
            let (pred, _) = predict(&model, &k_cross)?;
            let pred = labels01(&pred);
            Ok((f1_score(truth, &pred, 1)?, balanced_accuracy(truth, &pred)?))
        };
        let (f1_c, ba_c) = score(&k_lin, linear_kernel(&xte, &xtr)?)?;
        let (f1_q, ba_q) = score(&k_q, quantum_kernel_matrix(&xte, &xtr, cfg.map_kind, cfg.repetitions)?)?;
        Ok(CellScores {
            f1_classical: f1_c,
            f1_quantum: f1_q,
            balanced_accuracy_classical: ba_c,
            balanced_accuracy_quantum: ba_q,
            geometric_difference: geometric_difference(&k_lin, &k_q, cfg.geodiff_reg)?,
        })
    })();
    (rows, scores.map_err(|e| e.to_string()))
}

pub fn cell_seed(seed: u64, f: usize, m: usize) -> u64 {
    derive_seed(seed, &[f as u64, m as u64])
}

/// Runs the whole grid. `ds` should already be quantile-normalized.
pub fn run_sweep(ds: &ExpressionDataset, cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let split = split_indices(ds.labels(), cfg.test_fraction, cfg.seed)?;
    let train = ds.select_rows(&split.train);
    let test = ds.select_rows(&split.test);
    if let Some(&m) = cfg.sample_counts.iter().max() {
        if m > train.n_samples() {
            return Err(Error::Config(format!(
                "sample count {m} exceeds the {} training samples",
                train.n_samples()
            )));
        }
    }

    let schedule = AnnealSchedule {
        seed: derive_seed(cfg.seed, &[u64::MAX]),
        ..cfg.anneal
    };
    let pool = select_pool(&train, cfg.selection_method, cfg.k_pool, &schedule)?;

    let ctx = CellContext {
        train: &train,
        test: &test,
        train_rows: &split.train,
        cfg,
    };
    let grid: Vec<(usize, usize)> = cfg
        .feature_counts
        .iter()
        .flat_map(|&f| cfg.sample_counts.iter().map(move |&m| (f, m)))
        .collect();
    let run_cells = || -> Vec<(CellRecord, CellRows)> {
        grid.par_iter()
            .map(|&(f, m)| {
                let seed = cell_seed(cfg.seed, f, m);
                let (features, outcome, rows) = if f > pool.len() {
                    let reason = format!("only {} pooled features available", pool.len());
                    let rows = CellRows {
                        feature_count: f,
                        sample_count: m,
                        subsample: Vec::new(),
                        scaling_fit: Vec::new(),
                        gram: Vec::new(),
                    };
                    (Vec::new(), CellOutcome::Failed { reason }, rows)
                } else {
                    let features = pool.top(f).to_vec();
                    let (rows, res) = evaluate_cell(&ctx, &features, m, seed);
                    let outcome = match res {
                        Ok(s) => CellOutcome::Ok(s),
                        Err(reason) => CellOutcome::Failed { reason },
                    };
                    (features, outcome, rows)
                };
                let record = CellRecord {
                    feature_count: f,
                    sample_count: m,
                    seed,
                    feature_ids: features.iter().map(|&j| train.feature_ids()[j].clone()).collect(),
                    feature_indices: features,
                    outcome,
                };
                (record, rows)
            })
            .collect()
    };
    let results = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run_cells),
        None => run_cells(),
    };
    let (cells, cell_rows): (Vec<CellRecord>, Vec<CellRows>) = results.into_iter().unzip();

    let nf = cfg.feature_counts.len();
    let ns = cfg.sample_counts.len();
    let surface = |metric: &str, kernel: &str, pick: fn(&CellScores) -> f64| -> Result<MetricSurface> {
        let mut values = vec![vec![None; ns]; nf];
        for (idx, cell) in cells.iter().enumerate() {
            if let CellOutcome::Ok(s) = &cell.outcome {
                values[idx / ns][idx % ns] = Some(pick(s));
            }
        }
        MetricSurface::from_cells(metric, kernel, cfg.feature_counts.clone(), cfg.sample_counts.clone(), values)
    };
    let surfaces = vec![
        surface("f1", "classical", |s| s.f1_classical)?,
        surface("f1", "quantum", |s| s.f1_quantum)?,
        surface("balanced_accuracy", "classical", |s| s.balanced_accuracy_classical)?,
        surface("balanced_accuracy", "quantum", |s| s.balanced_accuracy_quantum)?,
    ];
    let geometric_diff = surface("geometric_difference", "classical_vs_quantum", |s| s.geometric_difference)?;

    let (ptri, ptri_skipped) = if nf < 2 || ns < 2 {
        (Vec::new(), Some("grid too small".to_string()))
    } else {
        let mut out = Vec::new();
        for pair in surfaces.chunks(2) {
            let (c, q, d) = ptri_comparison(&pair[0], &pair[1])?;
            out.extend([c, q, d]);
        }
        (out, None)
    };

    let audit = LeakageAudit {
        test_rows: split.test.clone(),
        selection_rows: split.train.clone(),
        cells: cell_rows,
    };
    Ok(SweepResult {
        surfaces,
        geometric_diff,
        ptri,
        ptri_skipped,
        provenance: Provenance {
            config: cfg.clone(),
            n_train: split.train.len(),
            n_test: split.test.len(),
            pool,
            cells,
            audit,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn surface_file_name(s: &MetricSurface) -> String {
    format!("{}_{}.csv", s.metric_name, s.kernel_name)
}

/// Writes one tidy CSV per surface and/or a JSON bundle, then
/// `manifest.json` listing them (relative to `dir`).
pub fn export_result(res: &SweepResult, dir: impl AsRef<Path>, formats: &[ExportFormat]) -> Result<Manifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest {
        files: Vec::new(),
        warnings: Vec::new(),
    };
    if formats.is_empty() {
        manifest.warnings.push("no export formats requested".into());
    }
    if formats.contains(&ExportFormat::Csv) {
        let all = res
            .surfaces
            .iter()
            .chain(std::iter::once(&res.geometric_diff))
            .chain(&res.ptri);
        for s in all {
            let name = if res.ptri.iter().any(|p| std::ptr::eq(p, s)) {
                format!("ptri_{}", surface_file_name(s))
            } else {
                surface_file_name(s)
            };
            let f = std::fs::File::create(dir.join(&name))?;
            s.write_csv(std::io::BufWriter::new(f))?;
            manifest.files.push(name);
        }
    }
    if formats.contains(&ExportFormat::Json) {
        let name = "result.json".to_string();
        let f = std::fs::File::create(dir.join(&name))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), res)?;
        manifest.files.push(name);
    }
    let f = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &manifest)?;
    Ok(manifest)
}
