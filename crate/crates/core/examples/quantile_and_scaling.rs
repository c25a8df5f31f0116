//! Quantile-normalize a small expression matrix, split it, and scale both
//! halves into rotation angles using training rows only.

use eqa::data::{apply_minmax, fit_angle_scaling, quantile_normalize, train_test_split};
use eqa::synthetic::{generate, SyntheticSpec};

fn main() -> eqa::Result<()> {
    let ds = generate(&SyntheticSpec::golub_like(6, 7))?;
    let ds = ds.with_values(quantile_normalize(ds.values())?)?;

    let (train, test) = train_test_split(&ds, 0.2, 0)?;
    println!("{} train / {} test samples", train.n_samples(), test.n_samples());

    let params = fit_angle_scaling(train.values())?;
    let angles = apply_minmax(test.values(), &params)?;
    let row: Vec<String> = angles.row(0).iter().map(|a| format!("{a:.3}")).collect();
    println!("first test row as angles: [{}]", row.join(", "));
    Ok(())
}
