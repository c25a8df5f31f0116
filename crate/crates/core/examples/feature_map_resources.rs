//! Depth and gate counts of the ZZ and Pauli-Z feature maps.

use eqa::qsim::{build_zz_feature_map, estimate_resources, FeatureMapKind};

fn main() -> eqa::Result<()> {
    println!("zz depth, linear entanglement");
    for n in 2..=6 {
        let row: Vec<String> = (1..=4)
            .map(|r| estimate_resources(FeatureMapKind::Zz, n, r).map(|e| format!("{:>3}", e.depth)))
            .collect::<eqa::Result<_>>()?;
        println!("n={n}: {}", row.join(" "));
    }

    let e = estimate_resources(FeatureMapKind::PauliZ, 5, 3)?;
    println!("pauli_z n=5 r=3: depth {} H {} P {} CX {}", e.depth, e.h_count, e.p_count, e.cx_count);

    print!("{}", build_zz_feature_map(&[0.1, 0.2, 0.3], 1)?);
    Ok(())
}
