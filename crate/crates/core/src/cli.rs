//! `eqa` command-line front end. Stages hand off through files so the
//! expensive kernel stage can be cached.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::data::{apply_minmax, fit_minmax, load_expression_csv, quantile_normalize, CsvFormat, ExpressionDataset};
use crate::error::{Error, Result};
use crate::feature_select::{lasso_select_k, qubo_select_k, AnnealSchedule, FeatureSelection};
use crate::kernels::{linear_gram, linear_kernel, quantum_gram, quantum_kernel_matrix, KernelMatrix};
use crate::metrics::{balanced_accuracy, f1_score, geometric_difference, ptri_comparison, MetricSurface, DEFAULT_GEODIFF_REG};
use crate::qsim::{estimate_resources, FeatureMapKind, DEFAULT_REPETITIONS};
use crate::svm::{predict, smo_train, DEFAULT_C, DEFAULT_TOL};
use crate::sweep::{export_result, run_sweep, ExportFormat, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "eqa", version, about = "Quantum-kernel empirical advantage analysis")]
pub struct Cli {
    /// Print only machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantile-normalize (and optionally min-max scale) expression data into tidy CSV.
    Preprocess(PreprocessArgs),
    /// Select features by Lasso or QUBO annealing.
    Select(SelectArgs),
    /// Compute a kernel matrix from tidy data.
    Kernel(KernelArgs),
    /// Train an SVM on a precomputed kernel and score it on a test kernel.
    TrainEval(TrainEvalArgs),
    /// Run the configuration-grid experiment.
    Sweep(SweepArgs),
    /// Geometric difference between a classical and a quantum kernel.
    Geodiff(GeodiffArgs),
    /// Terrain ruggedness of metric surfaces.
    Ptri(PtriArgs),
    /// Depth and gate counts of feature-map circuits.
    Resources(ResourcesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputFormat {
    GolubWide,
    Tidy,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Input files; several golub-wide files (e.g. train + test) are stacked.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "tidy")]
    pub format: InputFormat,
    /// Companion `sample,class` file for golub-wide input.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub no_quantile: bool,
    /// Min-max scale every feature into [lo, hi] using all rows.
    #[arg(long)]
    pub scale: bool,
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    #[arg(long, default_value_t = PI)]
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Lasso,
    Qubo,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Tidy CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Write the selection JSON here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum KernelMap {
    Zz,
    #[value(name = "pauli_z", alias = "pauli-z")]
    PauliZ,
    Linear,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Tidy CSV whose rows become kernel rows.
    #[arg(long)]
    pub input: PathBuf,
    /// Tidy CSV whose rows become kernel columns (defaults to the input).
    #[arg(long)]
    pub against: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub map: KernelMap,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub reps: usize,
    /// Restrict to the features of a selection JSON.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Use only the first N selected features.
    #[arg(long, requires = "selection")]
    pub top: Option<usize>,
    /// Fit [0, π] min-max scaling on the `--against` (or input) rows first.
    #[arg(long)]
    pub scale: bool,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainEvalArgs {
    /// Square train × train kernel CSV.
    #[arg(long)]
    pub train_kernel: PathBuf,
    /// Test × train kernel CSV.
    #[arg(long)]
    pub test_kernel: PathBuf,
    /// Tidy CSV providing training labels.
    #[arg(long)]
    pub train_data: PathBuf,
    /// Tidy CSV providing test labels.
    #[arg(long)]
    pub test_data: PathBuf,
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML or JSON file with sweep settings.
    #[arg(long)]
    pub config: PathBuf,
    /// Tidy, quantile-normalized data (overrides the config's `data`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Run directory (overrides the config's `output_dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "csv,json")]
    pub formats: Vec<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GeodiffArgs {
    pub classical: PathBuf,
    pub quantum: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GEODIFF_REG)]
    pub reg: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PtriArgs {
    /// Tidy surface CSV (`feature_count,sample_count,value`).
    pub surface: PathBuf,
    /// Quantum surface; when given, the difference surface is also written.
    #[arg(long)]
    pub quantum: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MapArg {
    Zz,
    #[value(name = "pauli_z", alias = "pauli-z")]
    PauliZ,
}

impl From<MapArg> for FeatureMapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Zz => FeatureMapKind::Zz,
            MapArg::PauliZ => FeatureMapKind::PauliZ,
        }
    }
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    #[arg(long, value_enum)]
    pub map: MapArg,
    #[arg(long, required_unless_present = "table")]
    pub qubits: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub reps: usize,
    /// Depth and gate-count tables over qubits 2..=6 (1..=6 for pauli_z) and repetitions 1..=4.
    #[arg(long)]
    pub table: bool,
}

/// Outcome of a subcommand: payload for stdout plus diagnostics for stderr.
struct Output {
    stdout: String,
    notes: Vec<String>,
}

impl Output {
    fn text(s: impl Into<String>) -> Self {
        Self {
            stdout: s.into(),
            notes: Vec::new(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            for note in &out.notes {
                let _ = writeln!(stderr, "{note}");
            }
            if !out.stdout.is_empty() {
                let _ = writeln!(stdout, "{}", out.stdout.trim_end());
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Preprocess(a) => preprocess(a, cli.json),
        Command::Select(a) => select(a),
        Command::Kernel(a) => kernel(a, cli.json),
        Command::TrainEval(a) => train_eval(a),
        Command::Sweep(a) => sweep(a, cli.json),
        Command::Geodiff(a) => geodiff(a, cli.json),
        Command::Ptri(a) => ptri(a, cli.json),
        Command::Resources(a) => resources(a, cli.json),
    }
}

fn load_tidy(path: &Path) -> Result<ExpressionDataset> {
    load_expression_csv(path, CsvFormat::Tidy)
}

fn write_json_file(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn preprocess(a: &PreprocessArgs, json: bool) -> Result<Output> {
    let mut ds: Option<ExpressionDataset> = None;
    for input in &a.input {
        let next = match a.format {
            InputFormat::Tidy => load_tidy(input)?,
            InputFormat::GolubWide => {
                let labels = a
                    .labels
                    .as_deref()
                    .ok_or_else(|| usage("--labels is required for golub-wide input"))?;
                load_expression_csv(input, CsvFormat::GolubWide { labels })?
            }
        };
        ds = Some(match ds {
            None => next,
            Some(prev) => prev.concat(&next)?,
        });
    }
    let mut ds = ds.expect("clap requires at least one input");
    if !a.no_quantile {
        ds = ds.with_values(quantile_normalize(ds.values())?)?;
    }
    if a.scale {
        let params = fit_minmax(ds.values(), a.lo, a.hi)?;
        ds = ds.with_values(apply_minmax(ds.values(), &params)?)?;
    }
    ds.save_tidy_csv(&a.output)?;
    let summary = json!({
        "output": a.output,
        "samples": ds.n_samples(),
        "features": ds.n_features(),
        "positives": ds.labels().iter().filter(|&&l| l == 1).count(),
    });
    Ok(if json {
        Output::text(summary.to_string())
    } else {
        Output::text(format!(
            "wrote {} samples × {} features to {}",
            ds.n_samples(),
            ds.n_features(),
            a.output.display()
        ))
    })
}

fn select(a: &SelectArgs) -> Result<Output> {
    let ds = load_tidy(&a.input)?;
    let y = ds.signed_labels();
    let sel = match a.method {
        MethodArg::Lasso => lasso_select_k(ds.values(), &y, a.k)?,
        MethodArg::Qubo => {
            let mut schedule = AnnealSchedule {
                seed: a.seed,
                ..Default::default()
            };
            if let Some(s) = a.sweeps {
                schedule.sweeps = s;
            }
            if let Some(r) = a.restarts {
                schedule.restarts = r;
            }
            qubo_select_k(ds.values(), &y, a.k, &schedule)?
        }
    }
    .with_ids(ds.feature_ids());
    let mut out = Output::text(String::new());
    if let Some(w) = &sel.warning {
        out.notes.push(format!("warning: {w}"));
    }
    match &a.output {
        Some(path) => write_json_file(path, &sel)?,
        None => out.stdout = serde_json::to_string_pretty(&sel)?,
    }
    Ok(out)
}

fn restrict(ds: &ExpressionDataset, selection: Option<&FeatureSelection>, top: Option<usize>) -> Result<ExpressionDataset> {
    let Some(sel) = selection else {
        return Ok(ds.clone());
    };
    let wanted: Vec<usize> = if sel.feature_ids.is_empty() {
        sel.indices.clone()
    } else {
        sel.feature_ids
            .iter()
            .map(|id| {
                ds.feature_ids()
                    .iter()
                    .position(|f| f == id)
                    .ok_or_else(|| Error::InvalidInput(format!("selected feature {id:?} not in data")))
            })
            .collect::<Result<_>>()?
    };
    let n = top.unwrap_or(wanted.len()).min(wanted.len());
    if let Some(&bad) = wanted[..n].iter().find(|&&j| j >= ds.n_features()) {
        return Err(Error::InvalidInput(format!("selected index {bad} out of range")));
    }
    Ok(ds.select_features(&wanted[..n]))
}

fn kernel(a: &KernelArgs, json: bool) -> Result<Output> {
    let selection: Option<FeatureSelection> = match &a.selection {
        Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let rows = restrict(&load_tidy(&a.input)?, selection.as_ref(), a.top)?;
    let cols = match &a.against {
        Some(p) => Some(restrict(&load_tidy(p)?, selection.as_ref(), a.top)?),
        None => None,
    };
    let (mut xr, mut xc) = (rows.values().clone(), cols.as_ref().map(|c| c.values().clone()));
    if a.scale {
        let params = fit_minmax(xc.as_ref().unwrap_or(&xr), 0.0, PI)?;
        xr = apply_minmax(&xr, &params)?;
        xc = xc.map(|c| apply_minmax(&c, &params)).transpose()?;
    }
    let quantum = |map: FeatureMapKind| -> Result<KernelMatrix> {
        match &xc {
            Some(c) => quantum_kernel_matrix(&xr, c, map, a.reps),
            None => quantum_gram(&xr, map, a.reps),
        }
    };
    let k = match a.map {
        KernelMap::Linear => match &xc {
            Some(c) => linear_kernel(&xr, c)?,
            None => linear_gram(&xr),
        },
        KernelMap::Zz => quantum(FeatureMapKind::Zz)?,
        KernelMap::PauliZ => quantum(FeatureMapKind::PauliZ)?,
    };
    let col_ids = cols.as_ref().unwrap_or(&rows).sample_ids().to_vec();
    let k = k.with_ids(rows.sample_ids().to_vec(), col_ids)?;
    k.save_csv(&a.output)?;
    let (r, c) = k.shape();
    Ok(if json {
        Output::text(json!({"output": a.output, "rows": r, "cols": c, "kind": k.kind.name()}).to_string())
    } else {
        Output::text(format!("wrote {r}×{c} {} kernel to {}", k.kind, a.output.display()))
    })
}

fn train_eval(a: &TrainEvalArgs) -> Result<Output> {
    let k_train = KernelMatrix::load_csv(&a.train_kernel)?;
    let k_test = KernelMatrix::load_csv(&a.test_kernel)?;
    let train = load_tidy(&a.train_data)?;
    let test = load_tidy(&a.test_data)?;
    if k_train.shape() != (train.n_samples(), train.n_samples()) {
        return Err(Error::Shape(format!(
            "train kernel {:?} for {} training samples",
            k_train.shape(),
            train.n_samples()
        )));
    }
    if k_test.shape().0 != test.n_samples() {
        return Err(Error::Shape(format!(
            "test kernel has {} rows for {} test samples",
            k_test.shape().0,
            test.n_samples()
        )));
    }
    let model = smo_train(&k_train, &train.signed_labels(), a.c, a.tol)?;
    let (pred, decision) = predict(&model, &k_test)?;
    let pred: Vec<u8> = pred.iter().map(|&p| u8::from(p > 0.0)).collect();
    let report = json!({
        "f1": f1_score(test.labels(), &pred, 1)?,
        "balanced_accuracy": balanced_accuracy(test.labels(), &pred)?,
        "predictions": pred,
        "decision_values": decision,
        "model": model,
    });
    match &a.output {
        Some(p) => {
            write_json_file(p, &report)?;
            Ok(Output::text(String::new()))
        }
        None => Ok(Output::text(serde_json::to_string_pretty(&report)?)),
    }
}

fn sweep(a: &SweepArgs, json: bool) -> Result<Output> {
    let mut cfg = SweepConfig::load(&a.config).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("cannot read config {}: {io}", a.config.display())),
        other => other,
    })?;
    if let Some(d) = &a.data {
        cfg.data = Some(d.clone());
    }
    if let Some(o) = &a.out {
        cfg.output_dir = Some(o.clone());
    }
    if a.jobs.is_some() {
        cfg.jobs = a.jobs;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let data = cfg.data.clone().ok_or_else(|| usage("no data file given (--data or config `data`)"))?;
    let out_dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| usage("no output directory given (--out or config `output_dir`)"))?;
    let ds = load_tidy(&data)?;
    let res = run_sweep(&ds, &cfg)?;
    res.provenance.audit.verify()?;
    let formats: Vec<ExportFormat> = a
        .formats
        .iter()
        .map(|f| match f {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
        })
        .collect();
    let manifest = export_result(&res, &out_dir, &formats)?;
    let mut out = Output::text(if json {
        serde_json::to_string(&manifest)?
    } else {
        format!("wrote {} files to {}", manifest.files.len(), out_dir.display())
    });
    out.notes.extend(manifest.warnings.iter().map(|w| format!("warning: {w}")));
    if let Some(w) = &res.provenance.pool.warning {
        out.notes.push(format!("warning: {w}"));
    }
    Ok(out)
}

fn geodiff(a: &GeodiffArgs, json: bool) -> Result<Output> {
    let kc = KernelMatrix::load_csv(&a.classical)?;
    let kq = KernelMatrix::load_csv(&a.quantum)?;
    let g = geometric_difference(&kc, &kq, a.reg)?;
    let report = json!({"geometric_difference": g, "reg": a.reg, "size": kc.shape().0});
    if let Some(p) = &a.output {
        write_json_file(p, &report)?;
    }
    Ok(Output::text(if json { report.to_string() } else { format_scalar(g) }))
}

/// Six decimals with trailing zeros dropped (`1.0`, `0.25`, `3.141593`).
fn format_scalar(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn ptri(a: &PtriArgs, json: bool) -> Result<Output> {
    let read = |p: &Path, kernel: &str| -> Result<MetricSurface> {
        let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("metric");
        MetricSurface::read_csv(std::fs::File::open(p)?, name, kernel)
    };
    std::fs::create_dir_all(&a.out_dir)?;
    let mut written = Vec::new();
    let mut save = |s: &MetricSurface, file: &str| -> Result<()> {
        let path = a.out_dir.join(file);
        s.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        written.push(path);
        Ok(())
    };
    match &a.quantum {
        None => {
            let s = read(&a.surface, "surface")?;
            save(&crate::metrics::tri_surface(&s)?, "tri.csv")?;
        }
        Some(q) => {
            let c = read(&a.surface, "classical")?;
            let q = read(q, "quantum")?;
            let (tc, tq, d) = ptri_comparison(&c, &q)?;
            save(&tc, "tri_classical.csv")?;
            save(&tq, "tri_quantum.csv")?;
            save(&d, "tri_difference.csv")?;
        }
    }
    Ok(Output::text(if json {
        json!({ "files": written }).to_string()
    } else {
        written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join("\n")
    }))
}

fn resources(a: &ResourcesArgs, json: bool) -> Result<Output> {
    let kind = FeatureMapKind::from(a.map);
    if !a.table {
        let n = a.qubits.expect("clap enforces --qubits without --table");
        let est = estimate_resources(kind, n, a.reps)?;
        return Ok(Output::text(serde_json::to_string_pretty(&est)?));
    }
    let qubits: Vec<usize> = match kind {
        FeatureMapKind::Zz => (2..=6).collect(),
        FeatureMapKind::PauliZ => (1..=6).collect(),
    };
    let reps: Vec<usize> = (1..=4).collect();
    let mut grid = Vec::new();
    for &n in &qubits {
        let row = reps
            .iter()
            .map(|&r| estimate_resources(kind, n, r))
            .collect::<Result<Vec<_>>>()?;
        grid.push(row);
    }
    if json {
        return Ok(Output::text(serde_json::to_string(&json!({
            "map_kind": kind,
            "qubits": qubits,
            "repetitions": reps,
            "estimates": grid,
        }))?));
    }
    let mut s = format!("depth of the {kind} feature map (linear entanglement)\n");
    s.push_str(&format!("{:>5} |", "n\\r"));
    for r in &reps {
        s.push_str(&format!("{r:>5}"));
    }
    s.push('\n');
    s.push_str(&format!("{}\n", "-".repeat(7 + 5 * reps.len())));
    for (n, row) in qubits.iter().zip(&grid) {
        s.push_str(&format!("{n:>5} |"));
        for e in row {
            s.push_str(&format!("{:>5}", e.depth));
        }
        s.push('\n');
    }
    s.push_str("\ngate counts (H / P / CX)\n");
    for (n, row) in qubits.iter().zip(&grid) {
        s.push_str(&format!("{n:>5} |"));
        for e in row {
            s.push_str(&format!(" {:>3}/{:>3}/{:>3}", e.h_count, e.p_count, e.cx_count));
        }
        s.push('\n');
    }
    Ok(Output::text(s))
}
