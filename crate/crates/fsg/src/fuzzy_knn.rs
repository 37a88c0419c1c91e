//! Single-space fuzzy k-NN: exhaustive neighbor search, inverse
//! distance weighted membership vectors, leave-one-out training
//! memberships, and cross-validated selection of k.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{MembershipVector, RngSeed};
use crate::{Error, Result};

/// Distances below this are treated as exact hits; the membership vote
/// then restricts to the coincident neighbors with equal weights,
/// which is the pointwise limit of the inverse-distance weighting.
pub const ZERO_DISTANCE_TOL: f64 = 1e-12;

/// Default fuzzifier. Makes the weight exponent -2/(phi-1) = -2,
/// plain inverse-square-distance voting.
pub const DEFAULT_FUZZIFIER: f64 = 2.0;

/// Number of folds used when selecting k by cross-validation.
pub const SELECT_K_FOLDS: usize = 5;

/// Parameters of one fuzzy k-NN classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyKnnConfig {
    pub k: usize,
    pub fuzzifier: f64,
    pub num_classes: usize,
}

impl FuzzyKnnConfig {
    pub fn new(k: usize, fuzzifier: f64, num_classes: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !fuzzifier.is_finite() || fuzzifier <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "fuzzifier must be > 1, got {fuzzifier}"
            )));
        }
        if num_classes == 0 {
            return Err(Error::InvalidParameter("num_classes must be positive".into()));
        }
        Ok(FuzzyKnnConfig { k, fuzzifier, num_classes })
    }
}

/// The k nearest training rows for one query, ascending by distance.
/// Ties at equal distance keep ascending training-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    entries: Vec<(usize, f64)>,
}

impl NeighborList {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Shorter list holding only the first k neighbors.
    pub fn truncated(&self, k: usize) -> NeighborList {
        NeighborList { entries: self.entries[..k.min(self.entries.len())].to_vec() }
    }
}

/// Euclidean (l2) distance.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

fn distance_order(a: &(usize, f64), b: &(usize, f64)) -> std::cmp::Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Exhaustive exact search for the k nearest training rows.
pub fn find_k_nearest(query: &[f64], training: &[Vec<f64>], k: usize) -> Result<NeighborList> {
    find_k_nearest_excluding(query, training, k, usize::MAX)
}

/// Same as [`find_k_nearest`] but skips the row `exclude` (used for
/// leave-one-out evaluation; pass `usize::MAX` to skip nothing).
pub fn find_k_nearest_excluding(
    query: &[f64],
    training: &[Vec<f64>],
    k: usize,
    exclude: usize,
) -> Result<NeighborList> {
    let available = training.len() - usize::from(exclude < training.len());
    if k > available {
        return Err(Error::InsufficientData { needed: k, got: available });
    }
    let mut dists: Vec<(usize, f64)> = Vec::with_capacity(available);
    for (i, row) in training.iter().enumerate() {
        if i == exclude {
            continue;
        }
        dists.push((i, euclidean_distance(query, row)?));
    }
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, distance_order);
        dists.truncate(k);
    }
    dists.sort_unstable_by(distance_order);
    Ok(NeighborList { entries: dists })
}

/// Membership vector from inverse-distance-weighted neighbor votes:
/// component c is the normalized sum of weights d^(-2/(phi-1)) over
/// neighbors labeled c. Any neighbor within [`ZERO_DISTANCE_TOL`]
/// switches the vote to equal weights over the coincident neighbors.
pub fn fuzzy_membership(
    neighbors: &NeighborList,
    training_labels: &[usize],
    cfg: &FuzzyKnnConfig,
) -> Result<MembershipVector> {
    if neighbors.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut weights = vec![0.0; cfg.num_classes];
    let zero_hits: Vec<usize> = neighbors
        .entries
        .iter()
        .filter(|(_, d)| *d < ZERO_DISTANCE_TOL)
        .map(|(i, _)| *i)
        .collect();
    if !zero_hits.is_empty() {
        for &i in &zero_hits {
            let label = *training_labels.get(i).ok_or(Error::InvalidDataset(format!(
                "neighbor index {i} has no label"
            )))?;
            check_label(label, cfg.num_classes)?;
            weights[label] += 1.0;
        }
    } else {
        let exponent = -2.0 / (cfg.fuzzifier - 1.0);
        for &(i, d) in &neighbors.entries {
            let label = *training_labels.get(i).ok_or(Error::InvalidDataset(format!(
                "neighbor index {i} has no label"
            )))?;
            check_label(label, cfg.num_classes)?;
            weights[label] += d.powf(exponent);
        }
    }
    MembershipVector::from_weights(&weights)
}

fn check_label(label: usize, num_classes: usize) -> Result<()> {
    if label >= num_classes {
        return Err(Error::InvalidDataset(format!(
            "label {label} out of range 0..{num_classes}"
        )));
    }
    Ok(())
}

/// Membership of one query against a training matrix.
pub fn classify_query(
    query: &[f64],
    training: &[Vec<f64>],
    training_labels: &[usize],
    cfg: &FuzzyKnnConfig,
) -> Result<MembershipVector> {
    let neighbors = find_k_nearest(query, training, cfg.k)?;
    fuzzy_membership(&neighbors, training_labels, cfg)
}

/// Index of the maximum membership component; ties break to the
/// lowest class index.
pub fn predict_crisp(m: &MembershipVector) -> usize {
    m.argmax()
}

/// Leave-one-out membership matrix: row i is the membership of sample
/// i computed against the training set with sample i removed.
pub fn loo_memberships(
    features: &[Vec<f64>],
    labels: &[usize],
    cfg: &FuzzyKnnConfig,
) -> Result<Vec<MembershipVector>> {
    let n = features.len();
    if n < cfg.k + 1 {
        return Err(Error::InsufficientData { needed: cfg.k + 1, got: n });
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let neighbors = find_k_nearest_excluding(&features[i], features, cfg.k, i)?;
            fuzzy_membership(&neighbors, labels, cfg)
        })
        .collect()
}

/// Stratified fold assignment: per class, shuffled indices dealt
/// round-robin, so class proportions are near equal across folds.
fn stratified_folds(labels: &[usize], num_classes: usize, folds: usize, seed: RngSeed) -> Vec<usize> {
    let mut rng = seed.rng();
    let mut assignment = vec![0usize; labels.len()];
    for c in 0..num_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    assignment
}

/// Selects k in `1..=floor(sqrt(N))` by stratified 5-fold
/// cross-validation with crisp prediction, maximizing mean accuracy;
/// ties break to the smaller k.
pub fn select_k(
    features: &[Vec<f64>],
    labels: &[usize],
    num_classes: usize,
    fuzzifier: f64,
    seed: RngSeed,
) -> Result<usize> {
    let n = features.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    let k_max = (n as f64).sqrt().floor() as usize;
    let folds = stratified_folds(labels, num_classes, SELECT_K_FOLDS, seed);
    // correct[k-1] counts validation hits across all folds for that k
    let mut correct = vec![0usize; k_max];
    for fold in 0..SELECT_K_FOLDS {
        let train_idx: Vec<usize> = (0..n).filter(|&i| folds[i] != fold).collect();
        let val_idx: Vec<usize> = (0..n).filter(|&i| folds[i] == fold).collect();
        if train_idx.is_empty() || val_idx.is_empty() {
            continue;
        }
        let train_feats: Vec<Vec<f64>> = train_idx.iter().map(|&i| features[i].clone()).collect();
        let train_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
        let k_cap = k_max.min(train_feats.len());
        // One neighbor scan per validation point covers every k.
        let fold_hits: Vec<Vec<bool>> = val_idx
            .par_iter()
            .map(|&i| {
                let neighbors = find_k_nearest(&features[i], &train_feats, k_cap)?;
                let mut hits = Vec::with_capacity(k_cap);
                for k in 1..=k_cap {
                    let cfg = FuzzyKnnConfig { k, fuzzifier, num_classes };
                    let m = fuzzy_membership(&neighbors.truncated(k), &train_labels, &cfg)?;
                    hits.push(predict_crisp(&m) == labels[i]);
                }
                Ok(hits)
            })
            .collect::<Result<_>>()?;
        for hits in fold_hits {
            for (k_idx, hit) in hits.iter().enumerate() {
                if *hit {
                    correct[k_idx] += 1;
                }
            }
        }
    }
    let mut best_k = 1;
    for k in 2..=k_max {
        if correct[k - 1] > correct[best_k - 1] {
            best_k = k;
        }
    }
    Ok(best_k)
}
