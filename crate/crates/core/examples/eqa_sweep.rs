//! The full grid experiment on synthetic data, exported to a run directory.
//!
//!     cargo run --example eqa_sweep -- /tmp/eqa-run

use eqa::data::quantile_normalize;
use eqa::sweep::{export_result, run_sweep, ExportFormat, SweepConfig};
use eqa::synthetic::{generate, SyntheticSpec};

fn main() -> eqa::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "eqa-run".into());
    let ds = generate(&SyntheticSpec::golub_like(500, 0))?;
    let ds = ds.with_values(quantile_normalize(ds.values())?)?;

    let res = run_sweep(&ds, &SweepConfig::default())?;
    res.provenance.audit.verify()?;

    for s in &res.surfaces {
        println!("{} / {}", s.metric_name, s.kernel_name);
        for (f, row) in s.feature_axis.iter().zip(&s.values) {
            let cells: Vec<String> = row.iter().map(|v| v.map_or("  -  ".into(), |v| format!("{v:.3}"))).collect();
            println!("  {f:>2}: {}", cells.join(" "));
        }
    }
    let manifest = export_result(&res, &out, &[ExportFormat::Csv, ExportFormat::Json])?;
    println!("wrote {} files to {out}", manifest.files.len());
    Ok(())
}
