//! Minimal end-to-end use of the two-layer ensemble: generate a small
//! two-space dataset, train, classify held-out samples, and print the
//! decision trail (base memberships, fused meta membership) for a few
//! of them.
//!
//! Run with: cargo run --example train_and_classify

use fsg::stacking::{performance, KPolicy};
use fsg::synthetic::{build_fixture_dataset, FixtureName};
use fsg::{FsgModel, RngSeed};

fn main() -> fsg::Result<()> {
    let (train, test) =
        build_fixture_dataset(FixtureName::TwoClassGeom, 100, 0.5, RngSeed(42))?;
    println!(
        "training on {} samples, testing on {} ({} classes, {} feature spaces)",
        train.num_samples(),
        test.num_samples(),
        train.num_classes,
        train.num_spaces()
    );

    let model = FsgModel::train(&train, 2.0, KPolicy::Auto, RngSeed(42))?;
    println!("selected base k = {:?}, meta k = {}", model.base_k, model.meta_k);

    let predictions = model.classify_dataset(&test)?;
    let truth = test.labels();
    println!("test accuracy: {:.1}%\n", performance(&predictions, &truth)? * 100.0);

    println!("{:<10} {:>5} {:>5}  {:<24} meta membership", "sample", "true", "pred", "base memberships");
    for (p, y) in predictions.iter().zip(&truth).take(6) {
        let bases: Vec<String> = p
            .base_memberships
            .iter()
            .map(|m| format!("[{}]", join(m.values())))
            .collect();
        println!(
            "{:<10} {:>5} {:>5}  {:<24} [{}]",
            p.id,
            y,
            p.predicted,
            bases.join(" "),
            join(p.meta_membership.values())
        );
    }
    Ok(())
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" ")
}
