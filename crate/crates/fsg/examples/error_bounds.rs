//! Nearest neighbor error diagnostics: the finite-sample vs
//! asymptotic error gap measured on membership vectors, and the
//! empirical 1-NN error of a known-overlap Gaussian problem checked
//! against the e* <= eps <= 2e* band around the Bayes error.
//!
//! Run with: cargo run --release --example error_bounds

use fsg::analysis::{cover_hart_check, error_difference, large_sample_error, n_sample_error};
use fsg::fuzzy_knn::{classify_query, find_k_nearest, FuzzyKnnConfig};
use fsg::synthetic::{generate_dataset, GaussianSpec};
use fsg::RngSeed;

/// Phi(-2): the Bayes error of two unit-variance Gaussians whose
/// means sit 4 standard deviations apart, via Simpson quadrature.
fn bayes_error() -> f64 {
    let steps = 4000;
    let h = 2.0 / steps as f64;
    let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(0.0) + pdf(2.0);
    for i in 1..steps {
        acc += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 - acc * h / 3.0
}

fn main() -> fsg::Result<()> {
    // Two overlapping classes, one 2-D space, means 4 sigma apart.
    let means = vec![vec![vec![0.0, 0.0]], vec![vec![4.0, 0.0]]];
    let spec = GaussianSpec::isotropic(means, 1.0, 3000)?;
    let data = generate_dataset(&spec, RngSeed(7))?;
    let (train, test) = data.stratified_split(0.5, RngSeed(8));
    let feats = train.space_features(0);
    let labels = train.labels();

    // Empirical 1-NN error against the Bayes-error band.
    let wrong = test
        .samples
        .iter()
        .filter(|s| {
            let nn = find_k_nearest(&s.features[0], &feats, 1).unwrap();
            labels[nn.entries()[0].0] != s.label
        })
        .count();
    let eps = wrong as f64 / test.num_samples() as f64;
    let e_star = bayes_error();
    let check = cover_hart_check(eps, e_star, 0.01);
    println!("Bayes error e*           : {e_star:.4}");
    println!("empirical 1-NN error     : {eps:.4}");
    println!(
        "band [e*, 2e*] +- slack  : [{:.4}, {:.4}] -> {}",
        e_star - 0.01,
        2.0 * e_star + 0.01,
        if check.passed { "inside" } else { "OUTSIDE" }
    );

    // Error gap between a finite-sample membership estimate and the
    // asymptotic error of the test-point membership, averaged over
    // the test set: the quantity a learned decision-space distance is
    // built to shrink.
    let cfg = FuzzyKnnConfig::new(9, 2.0, 2)?;
    let mut gap_sum = 0.0;
    let mut n_err_sum = 0.0;
    let mut l_err_sum = 0.0;
    for s in &test.samples {
        let mu_test = classify_query(&s.features[0], &feats, &labels, &cfg)?;
        // Nearest training sample's membership stands in for the
        // training-side estimate at the same point.
        let nn = find_k_nearest(&s.features[0], &feats, 1)?;
        let mu_train = classify_query(&feats[nn.entries()[0].0], &feats, &labels, &cfg)?;
        gap_sum += error_difference(&mu_train, &mu_test)?;
        n_err_sum += n_sample_error(&mu_train, &mu_test)?;
        l_err_sum += large_sample_error(&mu_test);
    }
    let n = test.num_samples() as f64;
    println!("\naveraged over {} test samples (k = {}):", test.num_samples(), cfg.k);
    println!("finite-sample error      : {:.4}", n_err_sum / n);
    println!("asymptotic error         : {:.4}", l_err_sum / n);
    println!("error difference         : {:.4}", gap_sum / n);
    Ok(())
}
