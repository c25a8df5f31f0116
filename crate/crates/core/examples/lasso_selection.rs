//! Pick exactly k genes with the Lasso by bisecting the penalty.

use eqa::feature_select::lasso_select_k;
use eqa::synthetic::{generate, SyntheticSpec};

fn main() -> eqa::Result<()> {
    let ds = generate(&SyntheticSpec::golub_like(300, 1))?;
    let sel = lasso_select_k(ds.values(), &ds.signed_labels(), 10)?.with_ids(ds.feature_ids());

    println!("lambda = {}", sel.parameters["lambda"]);
    for (id, score) in sel.feature_ids.iter().zip(&sel.scores) {
        println!("{id}  |beta| = {score:.4}");
    }
    Ok(())
}
