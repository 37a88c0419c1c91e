//! Core domain types: labeled samples over multiple feature spaces,
//! membership and fusion vectors, dataset validation and splitting.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tolerance for the simplex sum of a single membership vector.
pub const MEMBERSHIP_SUM_TOL: f64 = 1e-9;
/// Tolerance for the total sum of a fusion vector (J concatenated
/// membership vectors accumulate rounding, so the band is wider).
pub const FUSION_SUM_TOL: f64 = 1e-8;

/// Seed for every random operation in the crate. The same seed with
/// the same configuration reproduces generated datasets and splits
/// bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Deterministic stream for this seed. All sampling in the crate
    /// draws from a ChaCha8 stream seeded here; Gaussian draws use an
    /// explicit Box-Muller transform of that stream, so regenerated
    /// fixtures are identical across runs on the same platform.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derived seed for repetition `r` of an experiment. A pure
    /// function of (seed, r): repetitions can run in any order.
    pub fn for_repetition(self, r: u64) -> RngSeed {
        RngSeed(self.0 ^ (r + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    /// Derived seed for a named stage within one repetition.
    pub fn for_stage(self, stage: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(stage.wrapping_mul(0xD1B5_4A32_D192_ED03)))
    }
}

/// One sample: a class label plus one feature vector per feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub id: String,
    /// Class index in `0..C`.
    pub label: usize,
    /// One vector per feature space; vector `j` has the space's
    /// dimension `D_j`.
    pub features: Vec<Vec<f64>>,
}

/// A dataset of samples sharing the same feature-space layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub samples: Vec<LabeledSample>,
    pub num_classes: usize,
    pub space_dims: Vec<usize>,
}

/// A single violation found by [`LabeledDataset::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyDataset,
    SpaceCountMismatch { sample: usize, expected: usize, got: usize },
    DimensionMismatch { sample: usize, space: usize, expected: usize, got: usize },
    NonFiniteFeature { sample: usize, space: usize },
    LabelOutOfRange { sample: usize, label: usize, num_classes: usize },
    EmptyClass { class: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDataset => write!(f, "empty dataset"),
            Violation::SpaceCountMismatch { sample, expected, got } => write!(
                f,
                "sample {sample}: has {got} feature spaces, dataset declares {expected}"
            ),
            Violation::DimensionMismatch { sample, space, expected, got } => write!(
                f,
                "sample {sample}, space {space}: dimension {got}, expected {expected}"
            ),
            Violation::NonFiniteFeature { sample, space } => {
                write!(f, "sample {sample}, space {space}: non-finite feature value")
            }
            Violation::LabelOutOfRange { sample, label, num_classes } => {
                write!(f, "sample {sample}: label {label} out of range 0..{num_classes}")
            }
            Violation::EmptyClass { class } => write!(f, "class {class} has no samples"),
        }
    }
}

impl LabeledDataset {
    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn num_spaces(&self) -> usize {
        self.space_dims.len()
    }

    /// Feature matrix of space `j` (one row per sample).
    pub fn space_features(&self, j: usize) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.features[j].clone()).collect()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Diagnostic scan: returns every violation found. An empty report
    /// means the dataset is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.samples.is_empty() {
            out.push(Violation::EmptyDataset);
            return out;
        }
        let j_expected = self.space_dims.len();
        for (i, s) in self.samples.iter().enumerate() {
            if s.features.len() != j_expected {
                out.push(Violation::SpaceCountMismatch {
                    sample: i,
                    expected: j_expected,
                    got: s.features.len(),
                });
                continue;
            }
            for (j, v) in s.features.iter().enumerate() {
                if v.len() != self.space_dims[j] {
                    out.push(Violation::DimensionMismatch {
                        sample: i,
                        space: j,
                        expected: self.space_dims[j],
                        got: v.len(),
                    });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    out.push(Violation::NonFiniteFeature { sample: i, space: j });
                }
            }
            if s.label >= self.num_classes {
                out.push(Violation::LabelOutOfRange {
                    sample: i,
                    label: s.label,
                    num_classes: self.num_classes,
                });
            }
        }
        for c in 0..self.num_classes {
            if !self.samples.iter().any(|s| s.label == c) {
                out.push(Violation::EmptyClass { class: c });
            }
        }
        out
    }

    /// Stratified split: each class is shuffled and cut at
    /// `train_fraction` independently, so per-class counts are exact.
    pub fn stratified_split(&self, train_fraction: f64, seed: RngSeed) -> (LabeledDataset, LabeledDataset) {
        let mut rng = seed.rng();
        let mut train_idx = Vec::new();
        let mut test_idx = Vec::new();
        for c in 0..self.num_classes {
            let mut idx: Vec<usize> = (0..self.samples.len())
                .filter(|&i| self.samples[i].label == c)
                .collect();
            idx.shuffle(&mut rng);
            let n_train = (idx.len() as f64 * train_fraction).round() as usize;
            train_idx.extend_from_slice(&idx[..n_train]);
            test_idx.extend_from_slice(&idx[n_train..]);
        }
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        (self.subset(&train_idx), self.subset(&test_idx))
    }

    fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            num_classes: self.num_classes,
            space_dims: self.space_dims.clone(),
        }
    }
}

/// A point on the C-dimensional probability simplex: one base-layer
/// classifier's decision for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVector(Vec<f64>);

impl MembershipVector {
    /// Accepts only vectors satisfying the simplex constraints:
    /// components nonnegative, sum within [`MEMBERSHIP_SUM_TOL`] of 1.
    pub fn new(values: Vec<f64>) -> crate::Result<Self> {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(crate::Error::InvalidParameter(
                "membership components must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > MEMBERSHIP_SUM_TOL {
            return Err(crate::Error::InvalidParameter(format!(
                "membership components sum to {sum}, expected 1"
            )));
        }
        Ok(MembershipVector(values))
    }

    /// Normalizes nonnegative weights into a membership vector.
    pub fn from_weights(weights: &[f64]) -> crate::Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(crate::Error::InvalidParameter(
                "weights must have a positive sum".into(),
            ));
        }
        MembershipVector::new(weights.iter().map(|w| w / sum).collect())
    }

    /// One-hot vector for `class` out of `num_classes`.
    pub fn one_hot(class: usize, num_classes: usize) -> Self {
        let mut v = vec![0.0; num_classes];
        v[class] = 1.0;
        MembershipVector(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    /// Index of the maximum component; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Concatenation of J membership vectors, classifier-major: block `j`
/// occupies indices `j*C..(j+1)*C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionVector {
    values: Vec<f64>,
    num_classes: usize,
}

impl FusionVector {
    pub fn concat(blocks: &[MembershipVector]) -> crate::Result<Self> {
        if blocks.is_empty() {
            return Err(crate::Error::InvalidParameter("no blocks to fuse".into()));
        }
        let c = blocks[0].num_classes();
        if blocks.iter().any(|b| b.num_classes() != c) {
            return Err(crate::Error::DimensionMismatch {
                expected: c,
                got: blocks.iter().map(|b| b.num_classes()).find(|&n| n != c).unwrap(),
            });
        }
        let mut values = Vec::with_capacity(c * blocks.len());
        for b in blocks {
            values.extend_from_slice(b.values());
        }
        Ok(FusionVector { values, num_classes: c })
    }

    /// Rebuilds a fusion vector from raw values, checking that each
    /// length-C block is a valid membership vector and that the total
    /// sums to J within [`FUSION_SUM_TOL`].
    pub fn from_values(values: Vec<f64>, num_classes: usize) -> crate::Result<Self> {
        if num_classes == 0 || !values.len().is_multiple_of(num_classes) {
            return Err(crate::Error::DimensionMismatch {
                expected: num_classes,
                got: values.len(),
            });
        }
        let j = values.len() / num_classes;
        for block in values.chunks(num_classes) {
            MembershipVector::new(block.to_vec())?;
        }
        let total: f64 = values.iter().sum();
        if (total - j as f64).abs() > FUSION_SUM_TOL {
            return Err(crate::Error::InvalidParameter(format!(
                "fusion components sum to {total}, expected {j}"
            )));
        }
        Ok(FusionVector { values, num_classes })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_blocks(&self) -> usize {
        self.values.len() / self.num_classes
    }

    pub fn block(&self, j: usize) -> &[f64] {
        &self.values[j * self.num_classes..(j + 1) * self.num_classes]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.num_classes)
    }
}
