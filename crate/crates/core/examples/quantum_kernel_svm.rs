//! Train SVMs on a quantum and a linear kernel and score them on held-out rows.

use eqa::data::{apply_minmax, fit_angle_scaling, train_test_split};
use eqa::kernels::{linear_gram, linear_kernel, quantum_gram, quantum_kernel_matrix};
use eqa::metrics::{balanced_accuracy, f1_score};
use eqa::qsim::FeatureMapKind;
use eqa::svm::{predict, smo_train, DEFAULT_C, DEFAULT_TOL};
use eqa::synthetic::{generate, SyntheticSpec};

fn main() -> eqa::Result<()> {
    let ds = generate(&SyntheticSpec::golub_like(4, 11))?;
    let (train, test) = train_test_split(&ds, 0.2, 1)?;
    let params = fit_angle_scaling(train.values())?;
    let xtr = apply_minmax(train.values(), &params)?;
    let xte = apply_minmax(test.values(), &params)?;
    let y = train.signed_labels();

    let kernels = [
        ("zz", quantum_gram(&xtr, FeatureMapKind::Zz, 2)?, quantum_kernel_matrix(&xte, &xtr, FeatureMapKind::Zz, 2)?),
        ("linear", linear_gram(&xtr), linear_kernel(&xte, &xtr)?),
    ];
    for (name, k_train, k_test) in kernels {
        let model = smo_train(&k_train, &y, DEFAULT_C, DEFAULT_TOL)?;
        let (pred, _) = predict(&model, &k_test)?;
        let pred: Vec<u8> = pred.iter().map(|&p| u8::from(p > 0.0)).collect();
        println!(
            "{name:>6}: {} support vectors, F1 {:.3}, balanced accuracy {:.3}",
            model.support_indices.len(),
            f1_score(test.labels(), &pred, 1)?,
            balanced_accuracy(test.labels(), &pred)?
        );
    }
    Ok(())
}
