//! Synthetic Gaussian benchmark generator: per-class multivariate
//! Gaussian sampling, checked-in mean-matrix fixtures, and the
//! overlap-convergence schedule that gradually collapses class means
//! onto each other.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledDataset, LabeledSample, RngSeed};
use crate::{Error, Result};

/// Per-class, per-space Gaussian parameters for a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub space_dims: Vec<usize>,
    /// `class_means[c][j]` is the mean vector of class c in space j.
    pub class_means: Vec<Vec<Vec<f64>>>,
    /// `class_covariances[c][j]` is the covariance of class c in
    /// space j (symmetric positive definite).
    pub class_covariances: Vec<Vec<Vec<Vec<f64>>>>,
    pub per_class_n: usize,
}

impl GaussianSpec {
    /// Spec with the same isotropic covariance `variance * I` for
    /// every class and space.
    pub fn isotropic(class_means: Vec<Vec<Vec<f64>>>, variance: f64, per_class_n: usize) -> Result<Self> {
        if class_means.is_empty() || class_means[0].is_empty() {
            return Err(Error::InvalidParameter("need at least one class and space".into()));
        }
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::InvalidParameter("variance must be positive".into()));
        }
        let space_dims: Vec<usize> = class_means[0].iter().map(|m| m.len()).collect();
        let class_covariances = class_means
            .iter()
            .map(|spaces| {
                spaces
                    .iter()
                    .map(|m| {
                        let d = m.len();
                        (0..d)
                            .map(|r| (0..d).map(|c| if r == c { variance } else { 0.0 }).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(GaussianSpec { space_dims, class_means, class_covariances, per_class_n })
    }

    pub fn num_classes(&self) -> usize {
        self.class_means.len()
    }

    pub fn num_spaces(&self) -> usize {
        self.space_dims.len()
    }
}

/// One draw from the standard normal via the Box-Muller transform of
/// two uniforms from the seeded stream. Kept explicit (rather than a
/// library distribution) so generated fixtures are reproducible
/// byte-for-byte for a given seed regardless of dependency versions.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Lower-triangular Cholesky factor of a symmetric matrix; fails on
/// matrices that are not positive definite.
fn cholesky(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = matrix.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        if matrix[i].len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix[i].len() });
        }
        for j in 0..=i {
            let dot: f64 = l[i][..j].iter().zip(&l[j][..j]).map(|(a, b)| a * b).sum();
            let sum = matrix[i][j] - dot;
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Draws `n` i.i.d. vectors from the Gaussian of `class` in `space`.
pub fn sample_class(
    spec: &GaussianSpec,
    class: usize,
    space: usize,
    n: usize,
    seed: RngSeed,
) -> Result<Vec<Vec<f64>>> {
    let mean = &spec.class_means[class][space];
    let l = cholesky(&spec.class_covariances[class][space])?;
    let d = mean.len();
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z: Vec<f64> = (0..d).map(|_| standard_normal(&mut rng)).collect();
        let x: Vec<f64> = (0..d)
            .map(|i| mean[i] + (0..=i).map(|k| l[i][k] * z[k]).sum::<f64>())
            .collect();
        out.push(x);
    }
    Ok(out)
}

/// Generates a full labeled dataset from the spec: `per_class_n`
/// samples per class, each with one vector per space. Each
/// (class, space) pair draws from its own derived seed stream.
pub fn generate_dataset(spec: &GaussianSpec, seed: RngSeed) -> Result<LabeledDataset> {
    let c_count = spec.num_classes();
    let j_count = spec.num_spaces();
    let mut samples = Vec::with_capacity(c_count * spec.per_class_n);
    for c in 0..c_count {
        let per_space: Vec<Vec<Vec<f64>>> = (0..j_count)
            .map(|j| sample_class(spec, c, j, spec.per_class_n, seed.for_stage((c * j_count + j) as u64)))
            .collect::<Result<_>>()?;
        #[allow(clippy::needless_range_loop)]
        for i in 0..spec.per_class_n {
            samples.push(LabeledSample {
                id: format!("c{c}_{i}"),
                label: c,
                features: (0..j_count).map(|j| per_space[j][i].clone()).collect(),
            });
        }
    }
    Ok(LabeledDataset {
        samples,
        num_classes: c_count,
        space_dims: spec.space_dims.clone(),
    })
}

/// The named mean-matrix fixtures shipped with the crate, used by the
/// synthetic benchmark experiments. Each fixture is a C x 2J matrix:
/// row c holds the class-c mean of every 2-dimensional space, laid
/// out (space 1 x, space 1 y, space 2 x, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixtureName {
    /// Every sample recoverable by at least one base classifier.
    AveCorr100,
    AveCorr90,
    AveCorr80,
    AveCorr70,
    /// The small 2-class, 2-space geometry study.
    TwoClassGeom,
}

impl FixtureName {
    pub const ALL: [FixtureName; 5] = [
        FixtureName::AveCorr100,
        FixtureName::AveCorr90,
        FixtureName::AveCorr80,
        FixtureName::AveCorr70,
        FixtureName::TwoClassGeom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FixtureName::AveCorr100 => "avecorr_1.0",
            FixtureName::AveCorr90 => "avecorr_0.9",
            FixtureName::AveCorr80 => "avecorr_0.8",
            FixtureName::AveCorr70 => "avecorr_0.7",
            FixtureName::TwoClassGeom => "twoclass_geom",
        }
    }
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<FixtureName> {
        FixtureName::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// A loaded fixture: the mean matrix plus its geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaFixture {
    pub name: FixtureName,
    /// C x 2J mean matrix.
    pub omega: Vec<Vec<f64>>,
    pub num_classes: usize,
    pub num_spaces: usize,
    /// Isotropic per-axis variance used with this fixture.
    pub variance: f64,
}

impl OmegaFixture {
    pub fn load(name: FixtureName) -> OmegaFixture {
        let (raw, variance) = match name {
            FixtureName::AveCorr100 => (include_str!("../data/omega_avecorr_1.0.csv"), 25.0),
            FixtureName::AveCorr90 => (include_str!("../data/omega_avecorr_0.9.csv"), 25.0),
            FixtureName::AveCorr80 => (include_str!("../data/omega_avecorr_0.8.csv"), 25.0),
            FixtureName::AveCorr70 => (include_str!("../data/omega_avecorr_0.7.csv"), 25.0),
            FixtureName::TwoClassGeom => (include_str!("../data/omega_twoclass_geom.csv"), 1.0),
        };
        let omega: Vec<Vec<f64>> = raw
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split(',').map(|v| v.trim().parse().expect("fixture data")).collect())
            .collect();
        let num_classes = omega.len();
        let num_spaces = omega[0].len() / 2;
        OmegaFixture { name, omega, num_classes, num_spaces, variance }
    }

    /// Per-class, per-space mean vectors (all spaces 2-dimensional).
    pub fn class_means(&self) -> Vec<Vec<Vec<f64>>> {
        self.omega
            .iter()
            .map(|row| row.chunks(2).map(|xy| xy.to_vec()).collect())
            .collect()
    }

    pub fn spec(&self, per_class_n: usize) -> GaussianSpec {
        GaussianSpec::isotropic(self.class_means(), self.variance, per_class_n)
            .expect("fixture geometry is valid")
    }
}

/// Generates a fixture dataset and splits it per class at
/// `train_fraction`.
pub fn build_fixture_dataset(
    name: FixtureName,
    per_class_n: usize,
    train_fraction: f64,
    seed: RngSeed,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let fixture = OmegaFixture::load(name);
    let data = generate_dataset(&fixture.spec(per_class_n), seed)?;
    Ok(data.stratified_split(train_fraction, seed.for_stage(u64::MAX / 3)))
}

/// Pairwise distance below which two class means count as merged.
pub const CONVERGENCE_TOL: f64 = 1e-9;
/// Default cap on the number of epochs (repeated 1/10 contractions
/// approach zero geometrically but never reach it in floating point).
pub const DEFAULT_EPOCH_CAP: usize = 200;

/// Iterator over datasets with gradually collapsing class means.
///
/// Epoch 0 samples from the means as given. Each later epoch moves
/// exactly one class mean toward another by one tenth of their
/// current distance (cycling over ordered class pairs, skipping pairs
/// already merged), then re-samples. The sequence ends when every
/// pairwise distance is below [`CONVERGENCE_TOL`] or the epoch cap is
/// reached.
pub struct EpochGenerator {
    spec: GaussianSpec,
    seed: RngSeed,
    epoch: usize,
    cap: usize,
    pair_cursor: usize,
    done: bool,
}

impl EpochGenerator {
    pub fn new(spec: GaussianSpec, seed: RngSeed, epoch_cap: usize) -> EpochGenerator {
        EpochGenerator { spec, seed, epoch: 0, cap: epoch_cap, pair_cursor: 0, done: false }
    }

    /// Concatenated-space distance between the means of two classes.
    pub fn mean_distance(&self, c: usize, c_other: usize) -> f64 {
        let a = &self.spec.class_means[c];
        let b = &self.spec.class_means[c_other];
        a.iter()
            .zip(b)
            .flat_map(|(ma, mb)| ma.iter().zip(mb).map(|(x, y)| (x - y) * (x - y)))
            .sum::<f64>()
            .sqrt()
    }

    fn all_merged(&self) -> bool {
        let c_count = self.spec.num_classes();
        (0..c_count).all(|a| (a + 1..c_count).all(|b| self.mean_distance(a, b) <= CONVERGENCE_TOL))
    }

    /// Moves the mean of one class toward another by 1/10 of their
    /// distance. Returns false when no unmerged pair remains.
    fn step(&mut self) -> bool {
        let c_count = self.spec.num_classes();
        let pairs: Vec<(usize, usize)> = (0..c_count)
            .flat_map(|a| (0..c_count).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        for offset in 0..pairs.len() {
            let (target, mover) = pairs[(self.pair_cursor + offset) % pairs.len()];
            if self.mean_distance(target, mover) > CONVERGENCE_TOL {
                self.pair_cursor = (self.pair_cursor + offset + 1) % pairs.len();
                let target_means = self.spec.class_means[target].clone();
                let mover_means = &mut self.spec.class_means[mover];
                for (m, t) in mover_means.iter_mut().zip(&target_means) {
                    for (x, tx) in m.iter_mut().zip(t) {
                        *x += 0.1 * (*tx - *x);
                    }
                }
                return true;
            }
        }
        false
    }

    pub fn current_spec(&self) -> &GaussianSpec {
        &self.spec
    }
}

impl Iterator for EpochGenerator {
    type Item = Result<LabeledDataset>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.epoch >= self.cap {
            return None;
        }
        if self.epoch > 0 && !self.step() {
            self.done = true;
            return None;
        }
        let data = generate_dataset(&self.spec, self.seed.for_stage(self.epoch as u64));
        self.epoch += 1;
        if self.all_merged() {
            self.done = true;
        }
        Some(data)
    }
}
