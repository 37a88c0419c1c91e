//! Histogram-based differential entropy estimation over feature,
//! decision, and fusion spaces.
//!
//! Scalar estimates use the binned form `-sum_b p_b * ln(p_b / w_b)`
//! over uniform bins on [0, 1]. The fusion space is estimated with a
//! product-bin joint histogram over one scalar per base classifier;
//! that estimate is subadditive (joint <= sum of marginals, equality
//! for independent blocks), which is exactly the comparison the
//! dependence verdict relies on.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::MembershipVector;
use crate::{Error, Result};

/// Default bin count for entropy tables. Comparisons are only
/// meaningful at one shared B.
pub const DEFAULT_BINS: usize = 32;

/// Uniform-width histogram over [0, 1], optionally with per-class
/// counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// B+1 ascending edges.
    pub edges: Vec<f64>,
    /// Total count per bin.
    pub counts: Vec<usize>,
    /// Per-bin, per-class counts when labels were supplied.
    pub class_counts: Option<Vec<Vec<usize>>>,
    pub num_samples: usize,
}

impl Histogram {
    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self, b: usize) -> f64 {
        self.edges[b + 1] - self.edges[b]
    }
}

/// Bin index on [0, 1]: a value exactly on an interior edge goes to
/// the right bin; 1.0 closes the last bin.
fn bin_index(value: f64, bins: usize) -> usize {
    ((value * bins as f64) as usize).min(bins - 1)
}

/// Builds a B-bin histogram of values in [0, 1].
pub fn build_histogram(values: &[f64], bins: usize, labels: Option<(&[usize], usize)>) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be at least 1".into()));
    }
    if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidParameter("histogram values must lie in [0,1]".into()));
    }
    let edges: Vec<f64> = (0..=bins).map(|b| b as f64 / bins as f64).collect();
    let mut counts = vec![0usize; bins];
    let mut class_counts = labels.map(|(_, c)| vec![vec![0usize; c]; bins]);
    for (i, &v) in values.iter().enumerate() {
        let b = bin_index(v, bins);
        counts[b] += 1;
        if let (Some(cc), Some((labels, num_classes))) = (&mut class_counts, labels) {
            let label = labels.get(i).copied().ok_or(Error::DimensionMismatch {
                expected: values.len(),
                got: labels.len(),
            })?;
            if label >= num_classes {
                return Err(Error::InvalidDataset(format!("label {label} out of range")));
            }
            cc[b][label] += 1;
        }
    }
    Ok(Histogram { edges, counts, class_counts, num_samples: values.len() })
}

/// Differential entropy estimate of a histogram, in nats:
/// `-sum_b p_b * ln(p_b / w_b)` with empty bins contributing zero.
/// Negative values indicate mass concentrated below bin resolution.
pub fn entropy(h: &Histogram) -> f64 {
    let n = h.num_samples as f64;
    h.counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(b, &c)| {
            let p = c as f64 / n;
            -p * (p / h.bin_width(b)).ln()
        })
        .sum()
}

/// Per-class entropy of scalar values: class c's distribution is the
/// histogram restricted to class c, renormalized within the class.
pub fn class_conditional_entropy_table(
    values: &[f64],
    labels: &[usize],
    num_classes: usize,
    bins: usize,
) -> Result<Vec<f64>> {
    let h = build_histogram(values, bins, Some((labels, num_classes)))?;
    let class_counts = h.class_counts.as_ref().expect("labels were supplied");
    let mut out = Vec::with_capacity(num_classes);
    for c in 0..num_classes {
        let n_c: usize = class_counts.iter().map(|bin| bin[c]).sum();
        if n_c == 0 {
            return Err(Error::InvalidDataset(format!("class {c} absent from entropy input")));
        }
        let ent: f64 = class_counts
            .iter()
            .enumerate()
            .filter(|(_, bin)| bin[c] > 0)
            .map(|(b, bin)| {
                let p = bin[c] as f64 / n_c as f64;
                -p * (p / h.bin_width(b)).ln()
            })
            .sum();
        out.push(ent);
    }
    Ok(out)
}

/// Joint entropy of J scalar streams over product bins: each sample
/// contributes the tuple of its per-stream bin indices, and the
/// estimate is `-sum p * ln(p / vol)` with cell volume (1/B)^J.
pub fn joint_entropy(streams: &[Vec<f64>], bins: usize) -> Result<f64> {
    if streams.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let n = streams[0].len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for s in streams {
        if s.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.len() });
        }
        if s.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter("histogram values must lie in [0,1]".into()));
        }
    }
    let mut cells: HashMap<Vec<u32>, usize> = HashMap::new();
    for i in 0..n {
        let key: Vec<u32> = streams.iter().map(|s| bin_index(s[i], bins) as u32).collect();
        *cells.entry(key).or_insert(0) += 1;
    }
    let log_volume = -(streams.len() as f64) * (bins as f64).ln();
    let nf = n as f64;
    Ok(cells
        .values()
        .map(|&c| {
            let p = c as f64 / nf;
            -p * p.ln()
        })
        .sum::<f64>()
        + log_volume)
}

/// Scalar decision-space reduction: for each sample, the membership
/// component of its own class. Concentration of these values near 1
/// is what low decision-space entropy measures.
pub fn own_class_components(memberships: &[MembershipVector], labels: &[usize]) -> Result<Vec<f64>> {
    if memberships.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: memberships.len() });
    }
    memberships
        .iter()
        .zip(labels)
        .map(|(m, &y)| {
            m.values().get(y).copied().ok_or(Error::InvalidDataset(format!(
                "label {y} out of range for membership of length {}",
                m.num_classes()
            )))
        })
        .collect()
}

/// Min-max normalization into [0, 1] for raw feature values. Constant
/// input maps to all zeros.
pub fn normalize_min_max(values: &[f64]) -> Vec<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi <= lo {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Comparison of the fusion-space entropy against the sum of
/// per-space entropies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionEntropyReport {
    pub per_space: Vec<f64>,
    pub sum_of_spaces: f64,
    pub fusion: f64,
    /// sum_of_spaces - fusion; positive means dependent decisions.
    pub difference: f64,
    pub dependent: bool,
}

/// Builds the dependence report: fusion entropy below the sum of
/// per-space entropies implies the base decisions are dependent.
pub fn fusion_entropy_comparison(per_space_entropies: &[f64], fusion_entropy: f64) -> Result<FusionEntropyReport> {
    if per_space_entropies.len() < 2 {
        return Err(Error::InvalidParameter(
            "fusion comparison needs at least two base spaces".into(),
        ));
    }
    let sum: f64 = per_space_entropies.iter().sum();
    let difference = sum - fusion_entropy;
    Ok(FusionEntropyReport {
        per_space: per_space_entropies.to_vec(),
        sum_of_spaces: sum,
        fusion: fusion_entropy,
        difference,
        dependent: difference > 1e-12,
    })
}
