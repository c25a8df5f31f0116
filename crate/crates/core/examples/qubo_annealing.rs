//! Relevance/redundancy QUBO: compare simulated annealing with brute force
//! on a problem small enough to enumerate.

use eqa::feature_select::{anneal, build_qubo_default, exhaustive_solve, qubo_select_k, AnnealSchedule};
use eqa::synthetic::{generate, SyntheticSpec};

fn main() -> eqa::Result<()> {
    let ds = generate(&SyntheticSpec::golub_like(16, 4))?;
    let y = ds.signed_labels();

    let q = build_qubo_default(ds.values(), &y, 4)?;
    let exact = exhaustive_solve(&q)?;
    let annealed = anneal(&q, &AnnealSchedule { seed: 3, ..Default::default() })?;
    println!("exhaustive: {:?} energy {:.6}", exact.selected(), exact.energy);
    println!("annealed:   {:?} energy {:.6}", annealed.selected(), annealed.energy);

    let sel = qubo_select_k(ds.values(), &y, 4, &AnnealSchedule::default())?;
    println!("{}", serde_json::to_string_pretty(&sel.with_ids(ds.feature_ids())).unwrap());
    Ok(())
}
