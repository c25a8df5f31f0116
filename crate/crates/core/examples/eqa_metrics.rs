//! Geometric difference between two kernels and terrain ruggedness of a
//! metric surface.

use eqa::kernels::{linear_gram, quantum_gram};
use eqa::metrics::{geometric_difference, ptri_comparison, MetricSurface, DEFAULT_GEODIFF_REG};
use eqa::qsim::FeatureMapKind;
use nalgebra::DMatrix;

fn main() -> eqa::Result<()> {
    let x = DMatrix::from_fn(10, 3, |i, j| ((i * 7 + j * 3) % 11) as f64 * 0.28);
    let kc = linear_gram(&x);
    let kq = quantum_gram(&x, FeatureMapKind::Zz, 2)?;
    println!("g(K_C, K_Q) = {:.4}", geometric_difference(&kc, &kq, DEFAULT_GEODIFF_REG)?);
    println!("g(K_Q, K_Q) = {:.4}", geometric_difference(&kq, &kq, DEFAULT_GEODIFF_REG)?);

    let axes = (vec![2, 8, 14], vec![25, 41, 57]);
    let classical = MetricSurface::new("f1", "classical", axes.0.clone(), axes.1.clone(), vec![
        vec![0.80, 0.82, 0.81],
        vec![0.85, 0.86, 0.86],
        vec![0.93, 0.88, 0.87],
    ])?;
    let quantum = MetricSurface::new("f1", "quantum", axes.0, axes.1, vec![
        vec![0.60, 0.75, 0.70],
        vec![0.90, 0.65, 0.80],
        vec![0.70, 0.85, 0.60],
    ])?;
    let (_, _, diff) = ptri_comparison(&classical, &quantum)?;
    for (f, row) in diff.feature_axis.iter().zip(&diff.values) {
        let cells: Vec<String> = row.iter().map(|v| format!("{:+.3}", v.unwrap_or(f64::NAN))).collect();
        println!("{f:>2} features: {}", cells.join("  "));
    }
    Ok(())
}
