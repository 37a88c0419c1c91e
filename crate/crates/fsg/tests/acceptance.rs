//! Acceptance gate: one test per release criterion. Each test prints
//! a single pass/fail line before asserting, so a full run yields a
//! scannable checklist (`cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use rand::Rng;

use fsg::analysis::{
    cover_hart_check, decision_distance, error_difference, large_sample_error, n_sample_error,
};
use fsg::dataset::{FusionVector, LabeledDataset, MembershipVector, RngSeed};
use fsg::entropy::{build_histogram, entropy, joint_entropy};
use fsg::experiment::{run_experiment, DataSource, ExperimentConfig};
use fsg::fuzzy_knn::{
    classify_query, find_k_nearest, loo_memberships, predict_crisp, FuzzyKnnConfig,
};
use fsg::synthetic::{generate_dataset, FixtureName, GaussianSpec};

fn verdict(criterion: &str, passed: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn random_simplex(rng: &mut impl Rng, c: usize) -> MembershipVector {
    let raw: Vec<f64> = (0..c).map(|_| -(rng.gen_range(1e-12_f64..1.0)).ln()).collect();
    MembershipVector::from_weights(&raw).unwrap()
}

/// Random single-space training set on a coarse grid (grid values
/// force distance ties and exact duplicates).
fn random_instance(
    rng: &mut impl Rng,
    n_max: usize,
    d_max: usize,
    c_max: usize,
) -> (Vec<Vec<f64>>, Vec<usize>, usize) {
    let n = rng.gen_range(12..=n_max);
    let d = rng.gen_range(1..=d_max);
    let c = rng.gen_range(2..=c_max);
    let features = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0..4) as f64).collect())
        .collect();
    let mut labels: Vec<usize> = (0..n).map(|i| i % c).collect();
    for label in labels.iter_mut().skip(c) {
        *label = rng.gen_range(0..c);
    }
    (features, labels, c)
}

#[test]
fn c01_membership_and_fusion_simplex_invariants() {
    let start = Instant::now();
    let mut rng = RngSeed(101).rng();
    let mut calls = 0usize;
    let mut worst_sum_err: f64 = 0.0;
    let mut worst_fusion_err: f64 = 0.0;
    while calls < 100_000 {
        let (features, labels, c) = random_instance(&mut rng, 40, 6, 5);
        let mut block = Vec::new();
        for _ in 0..200 {
            let k = rng.gen_range(1..=10.min(features.len()));
            let phi = rng.gen_range(1.2..4.0);
            let cfg = FuzzyKnnConfig::new(k, phi, c).unwrap();
            let d = features[0].len();
            let query: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..5.0)).collect();
            let m = classify_query(&query, &features, &labels, &cfg).unwrap();
            let sum: f64 = m.values().iter().sum();
            assert!(m.values().iter().all(|&v| v >= 0.0));
            worst_sum_err = worst_sum_err.max((sum - 1.0).abs());
            calls += 1;
            block.push(m);
            if block.len() == 7 {
                let f = FusionVector::concat(&block).unwrap();
                let total: f64 = f.values().iter().sum();
                worst_fusion_err = worst_fusion_err.max((total - 7.0).abs());
                block.clear();
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst_sum_err <= 1e-9 && worst_fusion_err <= 1e-8 && elapsed < 30.0;
    verdict(
        "1 simplex invariants",
        passed,
        &format!(
            "{calls} calls, worst membership sum error {worst_sum_err:.2e}, worst fusion sum error {worst_fusion_err:.2e}, {elapsed:.1}s"
        ),
    );
}

/// Reference oracle: full sort by (distance, index).
fn naive_k_nearest(
    query: &[f64],
    training: &[Vec<f64>],
    k: usize,
    exclude: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut dists: Vec<(usize, f64)> = training
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, row)| {
            let d = query
                .iter()
                .zip(row.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            (i, d)
        })
        .collect();
    dists.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    dists.truncate(k);
    dists
}

/// Reference oracle for the membership rule, written independently.
fn naive_membership(neighbors: &[(usize, f64)], labels: &[usize], c: usize, phi: f64) -> Vec<f64> {
    let coincident: Vec<usize> = neighbors
        .iter()
        .filter(|(_, d)| *d < 1e-12)
        .map(|(i, _)| *i)
        .collect();
    let mut w = vec![0.0; c];
    if coincident.is_empty() {
        for &(i, d) in neighbors {
            w[labels[i]] += d.powf(-2.0 / (phi - 1.0));
        }
    } else {
        for &i in &coincident {
            w[labels[i]] += 1.0;
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

#[test]
fn c02_oracle_equivalence_with_naive_search() {
    let start = Instant::now();
    let mut rng = RngSeed(202).rng();
    let mut instances = 0;
    for _ in 0..200 {
        let (features, labels, c) = random_instance(&mut rng, 100, 8, 4);
        let k = rng.gen_range(1..=10.min(features.len() - 1));
        let phi = 2.0;

        // Exact agreement of the search, including tie order.
        let query: Vec<f64> = (0..features[0].len())
            .map(|_| rng.gen_range(0..4) as f64)
            .collect();
        let fast = find_k_nearest(&query, &features, k).unwrap();
        let slow = naive_k_nearest(&query, &features, k, None);
        assert_eq!(fast.entries(), slow.as_slice(), "neighbor search mismatch");

        // Leave-one-out memberships against the per-row oracle.
        let cfg = FuzzyKnnConfig::new(k, phi, c).unwrap();
        let loo = loo_memberships(&features, &labels, &cfg).unwrap();
        for (i, row) in loo.iter().enumerate() {
            let neigh = naive_k_nearest(&features[i], &features, k, Some(i));
            let expect = naive_membership(&neigh, &labels, c, phi);
            for (a, b) in row.values().iter().zip(&expect) {
                assert!((a - b).abs() <= 1e-12, "loo membership mismatch at row {i}");
            }
        }
        instances += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "2 oracle equivalence",
        elapsed < 30.0,
        &format!("{instances} randomized instances agreed exactly, {elapsed:.1}s"),
    );
}

#[test]
fn c03_error_difference_algebraic_identity() {
    let mut rng = RngSeed(303).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let c = rng.gen_range(2..10);
        let a = random_simplex(&mut rng, c);
        let b = random_simplex(&mut rng, c);
        let direct = error_difference(&a, &b).unwrap();
        let gap = n_sample_error(&a, &b).unwrap() - large_sample_error(&b);
        worst = worst.max((direct - gap).abs());
    }
    verdict(
        "3 error-difference identity",
        worst <= 1e-12,
        &format!("worst deviation {worst:.2e} over 10000 pairs"),
    );
}

#[test]
fn c04_distance_decomposes_over_fusion_blocks() {
    let mut rng = RngSeed(404).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let c = rng.gen_range(2..8);
        let j = rng.gen_range(2..8);
        let a: Vec<MembershipVector> = (0..j).map(|_| random_simplex(&mut rng, c)).collect();
        let b: Vec<MembershipVector> = (0..j).map(|_| random_simplex(&mut rng, c)).collect();
        let fa = FusionVector::concat(&a).unwrap();
        let fb = FusionVector::concat(&b).unwrap();
        let whole = decision_distance(fa.values(), fb.values()).unwrap();
        let by_block: f64 = (0..j)
            .map(|i| decision_distance(a[i].values(), b[i].values()).unwrap())
            .sum();
        worst = worst.max((whole - by_block).abs());
    }
    verdict(
        "4 block decomposition",
        worst <= 1e-12,
        &format!("worst deviation {worst:.2e} over 10000 pairs"),
    );
}

fn fixture_config(name: FixtureName, seed: u64, reps: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        DataSource::Fixture { name, per_class_n: 250 },
        RngSeed(seed),
    );
    cfg.repetitions = reps;
    cfg.train_fraction = 0.5;
    cfg
}

#[test]
fn c05_twelve_class_benchmark_bands() {
    let start = Instant::now();
    let report = run_experiment(&fixture_config(FixtureName::AveCorr100, 7, 5)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let fsg = report.average.fsg_accuracy;
    let ave_corr = report.average.ave_corr;
    let bases_ok = report
        .average
        .base_accuracy
        .iter()
        .all(|&a| (0.45..=0.75).contains(&a));
    let passed = ave_corr >= 0.97 && fsg >= 0.98 && bases_ok && elapsed < 180.0;
    verdict(
        "5 twelve-class benchmark bands",
        passed,
        &format!(
            "ave_corr {ave_corr:.4}, FSG {:.2}%, bases {:?}%, {elapsed:.0}s",
            fsg * 100.0,
            report
                .average
                .base_accuracy
                .iter()
                .map(|a| (a * 1000.0).round() / 10.0)
                .collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c06_accuracy_degrades_monotonically_across_fixtures() {
    let start = Instant::now();
    let sequence = [
        FixtureName::AveCorr100,
        FixtureName::AveCorr90,
        FixtureName::AveCorr80,
        FixtureName::AveCorr70,
    ];
    let accs: Vec<f64> = sequence
        .iter()
        .map(|&f| run_experiment(&fixture_config(f, 7, 5)).unwrap().average.fsg_accuracy)
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let monotone = accs.windows(2).all(|w| w[1] <= w[0] + 0.015);
    let floor = accs.iter().all(|&a| a >= 0.93);
    verdict(
        "6 monotone degradation",
        monotone && floor && elapsed < 600.0,
        &format!(
            "FSG accuracies {:?}%, {elapsed:.0}s",
            accs.iter().map(|a| (a * 1000.0).round() / 10.0).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c07_two_class_geometry_bands() {
    let mut cfg = fixture_config(FixtureName::TwoClassGeom, 7, 10);
    cfg.repetitions = 10;
    let report = run_experiment(&cfg).unwrap();
    let a = report.average.base_accuracy[0];
    let b = report.average.base_accuracy[1];
    let in_bands = |x: f64, y: f64| {
        (0.87..=0.95).contains(&x) && (0.88..=0.96).contains(&y)
    };
    let bases_ok = in_bands(a, b) || in_bands(b, a);
    let fsg = report.average.fsg_accuracy;
    let wins = report
        .repetitions
        .iter()
        .filter(|r| r.fsg_accuracy > r.base_accuracy[0] && r.fsg_accuracy > r.base_accuracy[1])
        .count();
    let passed = bases_ok && fsg >= 0.93 && wins >= 8;
    verdict(
        "7 two-class geometry",
        passed,
        &format!(
            "bases {:.1}%/{:.1}%, FSG {:.1}%, fusion beat both bases in {wins}/10 repetitions",
            a * 100.0,
            b * 100.0,
            fsg * 100.0
        ),
    );
}

/// Phi(-2) by Simpson quadrature of the standard normal density over
/// [0, 2]: Phi(-2) = 1/2 - integral.
fn phi_minus_two() -> f64 {
    let steps = 4000; // even
    let h = 2.0 / steps as f64;
    let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(0.0) + pdf(2.0);
    for i in 1..steps {
        acc += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 - acc * h / 3.0
}

#[test]
fn c08_nearest_neighbor_error_within_bayes_band() {
    let start = Instant::now();
    let e_star = phi_minus_two();
    assert!((e_star - 0.02275).abs() < 1e-4, "quadrature oracle drifted: {e_star}");
    let means = vec![vec![vec![0.0, 0.0]], vec![vec![4.0, 0.0]]];
    let spec = GaussianSpec::isotropic(means, 1.0, 5000).unwrap();
    let mut hits = 0;
    let mut errors = Vec::new();
    for run in 0..10 {
        let data = generate_dataset(&spec, RngSeed(800 + run)).unwrap();
        let (train, test) = data.stratified_split(0.5, RngSeed(900 + run));
        let feats = train.space_features(0);
        let labels = train.labels();
        let wrong = test
            .samples
            .iter()
            .filter(|s| {
                let nn = find_k_nearest(&s.features[0], &feats, 1).unwrap();
                labels[nn.entries()[0].0] != s.label
            })
            .count();
        let err = wrong as f64 / test.num_samples() as f64;
        let lower_ok = cover_hart_check(err, e_star, 0.01).lower_margin >= 0.0;
        let upper_ok = err <= 2.0 * e_star + 0.015;
        if lower_ok && upper_ok {
            hits += 1;
        }
        errors.push((err * 1000.0).round() / 10.0);
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "8 nearest-neighbor error band",
        hits >= 9 && elapsed < 120.0,
        &format!(
            "e* {:.4}, band [{:.4}, {:.4}], in band {hits}/10 runs, errors {errors:?}%, {elapsed:.0}s",
            e_star,
            e_star - 0.01,
            2.0 * e_star + 0.015
        ),
    );
}

#[test]
fn c09_entropy_dependence_verdict() {
    // Dependent case: the real benchmark's base decisions.
    let report = run_experiment(&fixture_config(FixtureName::AveCorr100, 9, 2)).unwrap();
    let rep = &report.repetitions[0];
    let fusion = rep.entropy.fusion.as_ref().unwrap();
    let dependent_ok = fusion.fusion <= fusion.sum_of_spaces && fusion.dependent;

    // Independent case: two independent uniform streams; the gap must
    // vanish within estimator noise.
    let mut rng = RngSeed(909).rng();
    let n = 100_000;
    let streams: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let sum: f64 = streams
        .iter()
        .map(|s| entropy(&build_histogram(s, 32, None).unwrap()))
        .sum();
    let joint = joint_entropy(&streams, 32).unwrap();
    let gap = (sum - joint).abs();
    verdict(
        "9 entropy dependence",
        dependent_ok && gap <= 0.05,
        &format!(
            "benchmark: fusion {:.2} <= sum {:.2} nats; independent streams gap {gap:.3} nats",
            fusion.fusion, fusion.sum_of_spaces
        ),
    );
}

fn timed_base_classification(train: &LabeledDataset, queries: &[Vec<f64>], k: usize) -> f64 {
    let feats = train.space_features(0);
    let labels = train.labels();
    let cfg = FuzzyKnnConfig::new(k, 2.0, train.num_classes).unwrap();
    let t0 = Instant::now();
    for q in queries {
        let m = classify_query(q, &feats, &labels, &cfg).unwrap();
        std::hint::black_box(predict_crisp(&m));
    }
    t0.elapsed().as_secs_f64()
}

#[test]
fn c10_classification_cost_scales_with_training_size() {
    let means = vec![vec![vec![0.0; 8]], vec![vec![2.0; 8]]];
    let mut rng = RngSeed(1010).rng();
    let queries: Vec<Vec<f64>> = (0..2000)
        .map(|_| (0..8).map(|_| rng.gen_range(-3.0..5.0)).collect())
        .collect();
    let mut times = Vec::new();
    for &n in &[1000usize, 2000, 4000] {
        let spec = GaussianSpec::isotropic(means.clone(), 1.0, n / 2).unwrap();
        let train = generate_dataset(&spec, RngSeed(42)).unwrap();
        // Warm-up pass, then best of three to damp scheduler noise.
        timed_base_classification(&train, &queries, 5);
        let best = (0..3)
            .map(|_| timed_base_classification(&train, &queries, 5))
            .fold(f64::INFINITY, f64::min);
        times.push(best);
    }
    let r1 = times[1] / times[0];
    let r2 = times[2] / times[1];
    let passed = (1.6..=4.8).contains(&r1) && (1.6..=4.8).contains(&r2);
    verdict(
        "10 complexity scaling",
        passed,
        &format!(
            "times {:?} ms, doubling ratios {r1:.2} and {r2:.2}",
            times.iter().map(|t| (t * 10000.0).round() / 10.0).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c11_identical_seeds_give_identical_reports() {
    let cfg = fixture_config(FixtureName::AveCorr100, 7, 5);
    let mut a = run_experiment(&cfg).unwrap();
    let mut b = run_experiment(&cfg).unwrap();
    a.strip_timings();
    b.strip_timings();
    let bytes_a = serde_json::to_vec(&a).unwrap();
    let bytes_b = serde_json::to_vec(&b).unwrap();
    verdict(
        "11 determinism",
        bytes_a == bytes_b,
        &format!("reports byte-identical after zeroing timings ({} bytes)", bytes_a.len()),
    );
}
