//! Expression data ingestion and preprocessing.
//!
//! Matrices are always samples × features. Class labels are `0` (ALL) and
//! `1` (AML); AML is the positive class everywhere in the crate.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;

pub const ACCESSION_COLUMN: &str = "Gene Accession Number";
pub const DESCRIPTION_COLUMN: &str = "Gene Description";

/// Labeled samples × features expression matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionDataset {
    values: DMatrix<f64>,
    feature_ids: Vec<String>,
    labels: Vec<u8>,
    sample_ids: Vec<String>,
}

impl ExpressionDataset {
    pub fn new(
        values: DMatrix<f64>,
        feature_ids: Vec<String>,
        labels: Vec<u8>,
        sample_ids: Vec<String>,
    ) -> Result<Self> {
        if values.nrows() != labels.len() || values.nrows() != sample_ids.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels and {} sample ids",
                values.nrows(),
                labels.len(),
                sample_ids.len()
            )));
        }
        if values.ncols() != feature_ids.len() {
            return Err(Error::Shape(format!(
                "{} columns but {} feature ids",
                values.ncols(),
                feature_ids.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidInput(format!("label {bad} is not 0 or 1")));
        }
        let mut seen = HashSet::new();
        for id in &feature_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate feature id {id:?}")));
            }
        }
        Ok(Self {
            values,
            feature_ids,
            labels,
            sample_ids,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    /// Labels mapped to ±1 (AML = +1).
    pub fn signed_labels(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&l| if l == 1 { 1.0 } else { -1.0 })
            .collect()
    }

    /// Returns a copy with the matrix replaced; shape must be unchanged.
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        if values.shape() != self.values.shape() {
            return Err(Error::Shape(format!(
                "replacement matrix {:?} does not match {:?}",
                values.shape(),
                self.values.shape()
            )));
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            values: self.values.select_rows(rows),
            feature_ids: self.feature_ids.clone(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            sample_ids: rows.iter().map(|&r| self.sample_ids[r].clone()).collect(),
        }
    }

    pub fn select_features(&self, cols: &[usize]) -> Self {
        Self {
            values: self.values.select_columns(cols),
            feature_ids: cols.iter().map(|&c| self.feature_ids[c].clone()).collect(),
            labels: self.labels.clone(),
            sample_ids: self.sample_ids.clone(),
        }
    }

    /// Stacks the samples of `other` below `self`. Feature ids must agree.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.feature_ids != other.feature_ids {
            return Err(Error::Shape(
                "cannot concatenate datasets with different feature ids".into(),
            ));
        }
        let (m1, m2, n) = (self.n_samples(), other.n_samples(), self.n_features());
        let values = DMatrix::from_fn(m1 + m2, n, |i, j| {
            if i < m1 {
                self.values[(i, j)]
            } else {
                other.values[(i - m1, j)]
            }
        });
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut sample_ids = self.sample_ids.clone();
        sample_ids.extend(other.sample_ids.iter().cloned());
        Self::new(values, self.feature_ids.clone(), labels, sample_ids)
    }

    /// Writes the tidy layout: `sample_id`, one column per feature, `label`.
    pub fn write_tidy_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = Vec::with_capacity(self.n_features() + 2);
        header.push("sample_id".to_string());
        header.extend(self.feature_ids.iter().cloned());
        header.push("label".to_string());
        w.write_record(&header)?;
        for i in 0..self.n_samples() {
            let mut rec = Vec::with_capacity(header.len());
            rec.push(self.sample_ids[i].clone());
            rec.extend(self.values.row(i).iter().map(|v| v.to_string()));
            rec.push(self.labels[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_tidy_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        self.write_tidy_csv(std::io::BufWriter::new(file))
    }
}

/// Accepted on-disk layouts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsvFormat<'a> {
    /// Genes as rows with a `Gene Accession Number` column, sample value
    /// columns interleaved with `call` columns, labels in a companion file of
    /// `sample id, class` rows.
    GolubWide { labels: &'a Path },
    /// Samples as rows; header holds feature ids; last column is the label.
    /// An optional leading `sample_id` column carries sample identifiers.
    Tidy,
}

pub fn load_expression_csv(path: impl AsRef<Path>, format: CsvFormat<'_>) -> Result<ExpressionDataset> {
    let path = path.as_ref();
    match format {
        CsvFormat::Tidy => load_tidy(path),
        CsvFormat::GolubWide { labels } => load_golub_wide(path, labels),
    }
}

fn parse_label(raw: &str) -> Option<u8> {
    match raw.trim().to_ascii_uppercase().as_str() {
        "0" | "ALL" => Some(0),
        "1" | "AML" => Some(1),
        _ => None,
    }
}

fn parse_value(path: &Path, raw: &str, row: &str, col: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            Error::ingest(
                path,
                format!("non-numeric expression value {raw:?} at row {row}, column {col:?}"),
            )
        })
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::ingest(path, e.to_string()))
}

fn load_tidy(path: &Path) -> Result<ExpressionDataset> {
    let mut reader = open_reader(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::ingest(path, "need at least one feature column and a label column"));
    }
    let has_ids = header[0].eq_ignore_ascii_case("sample_id") || header[0].is_empty();
    let first_feature = usize::from(has_ids);
    let label_col = header.len() - 1;
    let feature_ids: Vec<String> = header[first_feature..label_col].to_vec();
    if feature_ids.is_empty() {
        return Err(Error::ingest(path, "no feature columns"));
    }
    check_unique(path, &feature_ids)?;

    let mut rows: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut sample_ids = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let line = r + 2;
        if record.len() != header.len() {
            return Err(Error::ingest(
                path,
                format!("line {line} has {} cells, header has {}", record.len(), header.len()),
            ));
        }
        let sample_id = if has_ids {
            record[0].to_string()
        } else {
            format!("s{}", r)
        };
        for (j, fid) in feature_ids.iter().enumerate() {
            rows.push(parse_value(path, &record[first_feature + j], &line.to_string(), fid)?);
        }
        let label = parse_label(&record[label_col]).ok_or_else(|| {
            Error::ingest(
                path,
                format!(
                    "invalid label {:?} at line {line}, column {:?}",
                    &record[label_col], header[label_col]
                ),
            )
        })?;
        labels.push(label);
        sample_ids.push(sample_id);
    }
    let values = DMatrix::from_row_slice(labels.len(), feature_ids.len(), &rows);
    ExpressionDataset::new(values, feature_ids, labels, sample_ids)
}

fn check_unique(path: &Path, ids: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::ingest(path, format!("duplicate feature id {id:?}")));
        }
    }
    Ok(())
}

fn is_call_column(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    lower == "call" || lower.starts_with("call.") || lower.starts_with("call_")
}

fn load_label_file(path: &Path) -> Result<Vec<(String, u8)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::ingest(path, e.to_string()))?;
    let mut out = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::ingest(path, format!("line {} needs `sample, class`", r + 1)));
        }
        match parse_label(&record[1]) {
            Some(l) => out.push((record[0].to_string(), l)),
            // header line
            None if r == 0 => continue,
            None => {
                return Err(Error::ingest(
                    path,
                    format!("invalid label {:?} at line {}", &record[1], r + 1),
                ))
            }
        }
    }
    Ok(out)
}

fn load_golub_wide(path: &Path, label_path: &Path) -> Result<ExpressionDataset> {
    let labels_by_id = load_label_file(label_path)?;
    let mut reader = open_reader(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let acc_col = header
        .iter()
        .position(|h| h == ACCESSION_COLUMN)
        .ok_or_else(|| Error::ingest(path, format!("missing {ACCESSION_COLUMN:?} column")))?;
    let sample_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != acc_col && header[c] != DESCRIPTION_COLUMN && !is_call_column(&header[c]))
        .collect();
    if sample_cols.is_empty() {
        return Err(Error::ingest(path, "no sample columns"));
    }
    let sample_ids: Vec<String> = sample_cols.iter().map(|&c| header[c].clone()).collect();
    let labels = sample_ids
        .iter()
        .map(|sid| {
            labels_by_id
                .iter()
                .find(|(id, _)| id == sid)
                .map(|&(_, l)| l)
                .ok_or_else(|| Error::ingest(path, format!("no label for sample {sid:?}")))
        })
        .collect::<Result<Vec<u8>>>()?;

    // genes × samples as read; transposed below
    let mut feature_ids = Vec::new();
    let mut by_gene: Vec<f64> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let line = (r + 2).to_string();
        let gene = record
            .get(acc_col)
            .ok_or_else(|| Error::ingest(path, format!("line {line} is truncated")))?
            .to_string();
        for (&c, sid) in sample_cols.iter().zip(&sample_ids) {
            let raw = record
                .get(c)
                .ok_or_else(|| Error::ingest(path, format!("line {line} is truncated")))?;
            by_gene.push(parse_value(path, raw, &line, sid)?);
        }
        feature_ids.push(gene);
    }
    check_unique(path, &feature_ids)?;
    let n_genes = feature_ids.len();
    let n_samples = sample_ids.len();
    let values = DMatrix::from_fn(n_samples, n_genes, |s, g| by_gene[g * n_samples + s]);
    ExpressionDataset::new(values, feature_ids, labels, sample_ids)
}

/// Maps every sample (row) onto the mean order-statistic distribution.
///
/// Tied values within a row receive the average of the reference values
/// over the tied rank positions.
pub fn quantile_normalize(values: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, n) = values.shape();
    if m == 0 || n == 0 {
        return Err(Error::Shape("quantile normalization needs a non-empty matrix".into()));
    }
    let orders: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| values[(i, a)].total_cmp(&values[(i, b)]));
            idx
        })
        .collect();
    let mut reference = vec![0.0; n];
    for (i, order) in orders.iter().enumerate() {
        for (k, &j) in order.iter().enumerate() {
            reference[k] += values[(i, j)];
        }
    }
    for r in &mut reference {
        *r /= m as f64;
    }

    let mut out = DMatrix::zeros(m, n);
    for (i, order) in orders.iter().enumerate() {
        let mut start = 0;
        while start < n {
            let v = values[(i, order[start])];
            let mut end = start + 1;
            while end < n && values[(i, order[end])] == v {
                end += 1;
            }
            let mean = reference[start..end].iter().sum::<f64>() / (end - start) as f64;
            for &j in &order[start..end] {
                out[(i, j)] = mean;
            }
            start = end;
        }
    }
    Ok(out)
}

/// Per-feature min/max fitted on training rows, plus the target angle range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub per_feature_min: Vec<f64>,
    pub per_feature_max: Vec<f64>,
    pub target_lo: f64,
    pub target_hi: f64,
}

impl ScalingParams {
    pub fn len(&self) -> usize {
        self.per_feature_min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_feature_min.is_empty()
    }

    /// Constant training column; such features map to the range midpoint.
    pub fn is_degenerate(&self, feature: usize) -> bool {
        self.per_feature_min[feature] == self.per_feature_max[feature]
    }

    pub fn degenerate_features(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_degenerate(i)).collect()
    }
}

pub fn fit_minmax(train_values: &DMatrix<f64>, target_lo: f64, target_hi: f64) -> Result<ScalingParams> {
    if train_values.is_empty() {
        return Err(Error::Shape("cannot fit scaling on an empty matrix".into()));
    }
    if !(target_lo < target_hi) {
        return Err(Error::InvalidInput(format!(
            "target range [{target_lo}, {target_hi}] is empty"
        )));
    }
    let (per_feature_min, per_feature_max) = train_values
        .column_iter()
        .map(|c| (c.min(), c.max()))
        .unzip();
    Ok(ScalingParams {
        per_feature_min,
        per_feature_max,
        target_lo,
        target_hi,
    })
}

/// `fit_minmax` with the `[0, π]` angle range.
pub fn fit_angle_scaling(train_values: &DMatrix<f64>) -> Result<ScalingParams> {
    fit_minmax(train_values, 0.0, PI)
}

pub fn apply_minmax(values: &DMatrix<f64>, params: &ScalingParams) -> Result<DMatrix<f64>> {
    if values.ncols() != params.len() {
        return Err(Error::Shape(format!(
            "{} columns but scaling has {} features",
            values.ncols(),
            params.len()
        )));
    }
    let (lo, hi) = (params.target_lo, params.target_hi);
    let mid = 0.5 * (lo + hi);
    Ok(DMatrix::from_fn(values.nrows(), values.ncols(), |i, j| {
        let (min, max) = (params.per_feature_min[j], params.per_feature_max[j]);
        if min == max {
            return mid;
        }
        let scaled = lo + (values[(i, j)] - min) / (max - min) * (hi - lo);
        scaled.clamp(lo, hi)
    }))
}

/// Row indices of a train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn class_members(labels: &[u8]) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        out[usize::from(l)].push(i);
    }
    out
}

/// Largest-remainder allocation of `total` across classes, each class
/// receiving between `min_each` and `size - min_keep` items.
fn allocate(sizes: [usize; 2], total: usize, min_each: usize, min_keep: usize) -> [usize; 2] {
    let m = (sizes[0] + sizes[1]) as f64;
    let quotas = sizes.map(|s| total as f64 * s as f64 / m);
    let mut alloc = quotas.map(|q| q.floor() as usize);
    let mut remaining = total - alloc[0] - alloc[1];
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        alloc[c] += 1;
        remaining -= 1;
    }
    for c in 0..2 {
        let other = 1 - c;
        while alloc[c] < min_each && alloc[other] > min_each {
            alloc[c] += 1;
            alloc[other] -= 1;
        }
        while alloc[c] + min_keep > sizes[c] && alloc[other] + min_keep < sizes[other] {
            alloc[c] -= 1;
            alloc[other] += 1;
        }
    }
    alloc
}

/// Stratified train/test partition. The test set holds `ceil(f·m)` samples.
pub fn split_indices(labels: &[u8], test_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!("test fraction {test_fraction} not in (0, 1)")));
    }
    let classes = class_members(labels);
    for (c, members) in classes.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::Split(format!(
                "class {c} has {} samples, need at least 2",
                members.len()
            )));
        }
    }
    let m = labels.len();
    let n_test = ((test_fraction * m as f64) - 1e-9).ceil().max(2.0) as usize;
    let n_test = n_test.min(m - 2);
    let alloc = allocate([classes[0].len(), classes[1].len()], n_test, 1, 1);

    let mut rng = rng_from(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, members) in classes.iter().enumerate() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        test.extend_from_slice(&shuffled[..alloc[c]]);
        train.extend_from_slice(&shuffled[alloc[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

pub fn train_test_split(
    ds: &ExpressionDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(ExpressionDataset, ExpressionDataset)> {
    let split = split_indices(ds.labels(), test_fraction, seed)?;
    Ok((ds.select_rows(&split.train), ds.select_rows(&split.test)))
}

/// Chooses `m` rows preserving class proportions; returned indices ascend.
pub fn subsample_indices(labels: &[u8], m: usize, seed: u64) -> Result<Vec<usize>> {
    let classes = class_members(labels);
    if m < 2 {
        return Err(Error::InvalidInput(format!("subsample size {m} below 2")));
    }
    if m > labels.len() {
        return Err(Error::InvalidInput(format!(
            "subsample size {m} exceeds {} samples",
            labels.len()
        )));
    }
    if classes.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInput("subsampling needs both classes present".into()));
    }
    if m == labels.len() {
        return Ok((0..m).collect());
    }
    let alloc = allocate([classes[0].len(), classes[1].len()], m, 1, 0);
    let mut rng = rng_from(seed);
    let mut picked = Vec::with_capacity(m);
    for (c, members) in classes.iter().enumerate() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        picked.extend_from_slice(&shuffled[..alloc[c]]);
    }
    picked.sort_unstable();
    Ok(picked)
}

pub fn stratified_subsample(ds: &ExpressionDataset, m: usize, seed: u64) -> Result<ExpressionDataset> {
    let rows = subsample_indices(ds.labels(), m, seed)?;
    Ok(ds.select_rows(&rows))
}
