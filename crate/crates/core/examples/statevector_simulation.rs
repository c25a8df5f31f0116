//! Build a feature-map circuit and read back amplitudes and overlaps.

use eqa::qsim::{build_feature_map, simulate, FeatureMapKind};

fn main() -> eqa::Result<()> {
    let x = [0.4, 1.9, 2.7];
    let y = [0.5, 1.7, 2.9];
    let sx = simulate(&build_feature_map(FeatureMapKind::Zz, &x, 2)?)?;
    let sy = simulate(&build_feature_map(FeatureMapKind::Zz, &y, 2)?)?;

    for (i, a) in sx.amplitudes().iter().enumerate() {
        println!("|{i:03b}>  {:+.4} {:+.4}i", a.re, a.im);
    }
    println!("norm² = {:.12}", sx.norm_squared());
    println!("|<y|x>|² = {:.6}", sx.fidelity(&sy));
    Ok(())
}
