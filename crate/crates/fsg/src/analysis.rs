//! Diagnostics over membership vectors and ensembles: finite-sample
//! vs asymptotic nearest neighbor error, decision-space distances,
//! coverage of the nearest neighbor error band, and ensemble
//! diversity measures.

use serde::{Deserialize, Serialize};

use crate::dataset::MembershipVector;
use crate::{Error, Result};

/// Finite-sample nearest neighbor error estimate for a training/test
/// membership pair: 1 - sum_c mu_c(train) * mu_c(test).
pub fn n_sample_error(mu_train: &MembershipVector, mu_test: &MembershipVector) -> Result<f64> {
    if mu_train.num_classes() != mu_test.num_classes() {
        return Err(Error::DimensionMismatch {
            expected: mu_train.num_classes(),
            got: mu_test.num_classes(),
        });
    }
    let agree: f64 = mu_train.values().iter().zip(mu_test.values()).map(|(a, b)| a * b).sum();
    Ok(1.0 - agree)
}

/// Asymptotic (large training set) nearest neighbor error:
/// 1 - sum_c mu_c^2. Zero iff one-hot, maximal (1 - 1/C) at uniform.
pub fn large_sample_error(mu: &MembershipVector) -> f64 {
    1.0 - mu.values().iter().map(|v| v * v).sum::<f64>()
}

/// Difference between the finite-sample and asymptotic errors:
/// sum_c mu_c(test) * (mu_c(test) - mu_c(train)). Algebraically equal
/// to `n_sample_error(train, test) - large_sample_error(test)`.
pub fn error_difference(mu_train: &MembershipVector, mu_test: &MembershipVector) -> Result<f64> {
    if mu_train.num_classes() != mu_test.num_classes() {
        return Err(Error::DimensionMismatch {
            expected: mu_train.num_classes(),
            got: mu_test.num_classes(),
        });
    }
    Ok(mu_test
        .values()
        .iter()
        .zip(mu_train.values())
        .map(|(te, tr)| te * (te - tr))
        .sum())
}

/// Squared l2 distance between two decision-space points (membership
/// vectors or fusion vectors, as raw component slices). For fusion
/// vectors this equals the sum over blocks of per-block distances.
pub fn decision_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Fraction of samples correctly classified by at least one of the
/// base classifiers. `per_classifier` holds one crisp prediction
/// vector (length N) per classifier.
pub fn ave_corr(per_classifier: &[Vec<usize>], truth: &[usize]) -> Result<f64> {
    check_prediction_shape(per_classifier, truth)?;
    let covered = (0..truth.len())
        .filter(|&i| per_classifier.iter().any(|preds| preds[i] == truth[i]))
        .count();
    Ok(covered as f64 / truth.len() as f64)
}

/// J x J counts of recovery between classifiers: entry (r, c) is the
/// number of samples misclassified by classifier r and correctly
/// classified by classifier c. Row totals count all samples
/// misclassified by r.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingMatrix {
    pub counts: Vec<Vec<usize>>,
    pub row_totals: Vec<usize>,
}

pub fn sharing_matrix(per_classifier: &[Vec<usize>], truth: &[usize]) -> Result<SharingMatrix> {
    check_prediction_shape(per_classifier, truth)?;
    let j = per_classifier.len();
    let mut counts = vec![vec![0usize; j]; j];
    let mut row_totals = vec![0usize; j];
    for i in 0..truth.len() {
        for r in 0..j {
            if per_classifier[r][i] != truth[i] {
                row_totals[r] += 1;
                for c in 0..j {
                    if c != r && per_classifier[c][i] == truth[i] {
                        counts[r][c] += 1;
                    }
                }
            }
        }
    }
    Ok(SharingMatrix { counts, row_totals })
}

fn check_prediction_shape(per_classifier: &[Vec<usize>], truth: &[usize]) -> Result<()> {
    if per_classifier.is_empty() || truth.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for preds in per_classifier {
        if preds.len() != truth.len() {
            return Err(Error::DimensionMismatch { expected: truth.len(), got: preds.len() });
        }
    }
    Ok(())
}

/// Outcome of checking an empirical 1-NN error against the
/// `e* <= eps <= 2 e*` band around the Bayes error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverHartReport {
    pub passed: bool,
    /// Distance of the empirical error above the slackened lower
    /// bound (negative means the lower bound is violated).
    pub lower_margin: f64,
    /// Distance of the empirical error below the slackened upper
    /// bound (negative means the upper bound is violated).
    pub upper_margin: f64,
}

/// Checks `bayes - slack <= empirical <= 2*bayes + slack`. The slack
/// absorbs finite-sample fluctuation around the asymptotic band.
pub fn cover_hart_check(empirical_1nn_error: f64, bayes_error: f64, slack: f64) -> CoverHartReport {
    let lower_margin = empirical_1nn_error - (bayes_error - slack);
    let upper_margin = (2.0 * bayes_error + slack) - empirical_1nn_error;
    CoverHartReport {
        passed: lower_margin >= 0.0 && upper_margin >= 0.0,
        lower_margin,
        upper_margin,
    }
}
