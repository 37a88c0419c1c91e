//! Randomized property tests over the core invariants.

use proptest::collection::vec;
use proptest::prelude::*;

use fsg::analysis::{decision_distance, large_sample_error, n_sample_error};
use fsg::dataset::{FusionVector, LabeledDataset, LabeledSample, MembershipVector, RngSeed};
use fsg::entropy::{build_histogram, normalize_min_max};
use fsg::fuzzy_knn::{classify_query, FuzzyKnnConfig};

fn weights(c: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(1e-6_f64..1.0, c)
}

proptest! {
    #[test]
    fn normalized_weights_form_a_simplex(raw in (2usize..10).prop_flat_map(weights)) {
        let m = MembershipVector::from_weights(&raw).unwrap();
        let sum: f64 = m.values().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        prop_assert!(m.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn fusion_preserves_blocks(
        blocks in (2usize..6, 2usize..8).prop_flat_map(|(j, c)| vec(weights(c), j))
    ) {
        let ms: Vec<MembershipVector> = blocks
            .iter()
            .map(|w| MembershipVector::from_weights(w).unwrap())
            .collect();
        let f = FusionVector::concat(&ms).unwrap();
        for (j, m) in ms.iter().enumerate() {
            prop_assert_eq!(f.block(j), m.values());
        }
        let total: f64 = f.values().iter().sum();
        prop_assert!((total - ms.len() as f64).abs() <= 1e-8);
        // Raw round-trip revalidates every block.
        let rebuilt = FusionVector::from_values(f.values().to_vec(), ms[0].num_classes()).unwrap();
        prop_assert_eq!(rebuilt.values(), f.values());
    }

    #[test]
    fn error_estimates_stay_in_range(
        (wa, wb) in (2usize..8).prop_flat_map(|c| (weights(c), weights(c)))
    ) {
        let a = MembershipVector::from_weights(&wa).unwrap();
        let b = MembershipVector::from_weights(&wb).unwrap();
        let c = a.num_classes() as f64;
        let n_err = n_sample_error(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&n_err));
        let l_err = large_sample_error(&b);
        prop_assert!(l_err >= 0.0 && l_err <= 1.0 - 1.0 / c + 1e-12);
        prop_assert!(decision_distance(a.values(), b.values()).unwrap() >= 0.0);
    }

    #[test]
    fn classification_is_scale_insensitive_to_duplicate_labels(
        seed in 0u64..1000,
        k in 1usize..6,
    ) {
        // Whatever the geometry, memberships stay on the simplex.
        let mut rng = RngSeed(seed).rng();
        use rand::Rng;
        let n = 20;
        let feats: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            .collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let cfg = FuzzyKnnConfig::new(k, 2.0, 3).unwrap();
        let q = vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let m = classify_query(&q, &feats, &labels, &cfg).unwrap();
        let sum: f64 = m.values().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn stratified_split_partitions_every_class(
        seed in 0u64..1000,
        frac in 0.2f64..0.8,
    ) {
        let samples: Vec<LabeledSample> = (0..60)
            .map(|i| LabeledSample {
                id: format!("s{i}"),
                label: i % 3,
                features: vec![vec![i as f64]],
            })
            .collect();
        let d = LabeledDataset { samples, num_classes: 3, space_dims: vec![1] };
        let (tr, te) = d.stratified_split(frac, RngSeed(seed));
        prop_assert_eq!(tr.num_samples() + te.num_samples(), 60);
        for c in 0..3 {
            let n_tr = tr.samples.iter().filter(|s| s.label == c).count();
            prop_assert_eq!(n_tr, (20.0 * frac).round() as usize);
        }
        // No sample appears twice.
        let mut ids: Vec<&str> = tr.samples.iter().chain(&te.samples).map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), 60);
    }

    #[test]
    fn histogram_counts_total_the_input(values in vec(0.0f64..=1.0, 1..500), bins in 1usize..64) {
        let h = build_histogram(&values, bins, None).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<usize>(), values.len());
        prop_assert_eq!(h.num_samples, values.len());
    }

    #[test]
    fn min_max_normalization_lands_in_unit_interval(values in vec(-1e6f64..1e6, 1..200)) {
        let out = normalize_min_max(&values);
        prop_assert!(out.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
