//! Entropy of the decision and fusion spaces: how concentrated each
//! base classifier's own-class memberships are, and whether the base
//! decisions are statistically dependent (fusion entropy below the
//! sum of the per-space entropies).
//!
//! Run with: cargo run --release --example entropy_analysis

use fsg::entropy::{
    build_histogram, entropy, fusion_entropy_comparison, joint_entropy, own_class_components,
};
use fsg::stacking::KPolicy;
use fsg::synthetic::{build_fixture_dataset, FixtureName};
use fsg::{FsgModel, RngSeed};

fn main() -> fsg::Result<()> {
    let (train, test) =
        build_fixture_dataset(FixtureName::AveCorr100, 250, 0.5, RngSeed(7))?;
    let model = FsgModel::train(&train, 2.0, KPolicy::Auto, RngSeed(7))?;
    let predictions = model.classify_dataset(&test)?;
    let truth = test.labels();
    let bins = 32;

    // Scalar reduction per space: each test sample's membership in
    // its own class.
    let mut streams = Vec::new();
    let mut per_space = Vec::new();
    println!("decision-space entropy per base classifier ({bins} bins, nats):");
    for j in 0..model.num_spaces() {
        let memberships: Vec<_> =
            predictions.iter().map(|p| p.base_memberships[j].clone()).collect();
        let own = own_class_components(&memberships, &truth)?;
        let h = entropy(&build_histogram(&own, bins, None)?);
        println!("  base {}: {h:>8.3}", j + 1);
        per_space.push(h);
        streams.push(own);
    }

    let joint = joint_entropy(&streams, bins)?;
    let report = fusion_entropy_comparison(&per_space, joint)?;
    println!("sum of per-space entropies: {:>8.3}", report.sum_of_spaces);
    println!("fusion-space entropy      : {:>8.3}", report.fusion);
    println!("difference                : {:>8.3}", report.difference);
    println!(
        "verdict: base decisions are {}",
        if report.dependent { "dependent (fusion carries shared structure)" } else { "independent" }
    );
    Ok(())
}
