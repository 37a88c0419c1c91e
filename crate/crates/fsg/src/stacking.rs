//! The two-layer pipeline: per-space base classifiers producing
//! leave-one-out membership vectors, concatenation into the fusion
//! space, and the meta-layer classifier over fusion vectors.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FusionVector, LabeledDataset, MembershipVector, RngSeed};
use crate::fuzzy_knn::{self, FuzzyKnnConfig};
use crate::{Error, Result};

/// How k is chosen for each classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KPolicy {
    /// Same fixed k for every base classifier and the meta classifier.
    Fixed(usize),
    /// Cross-validated search over 1..=floor(sqrt(N)), independently
    /// per base space and for the meta layer.
    Auto,
}

/// A trained ensemble. k-NN is instance based, so the model carries
/// the training features, labels, and the fused training matrix
/// verbatim; nothing else is needed to classify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsgModel {
    pub num_classes: usize,
    pub space_dims: Vec<usize>,
    pub fuzzifier: f64,
    /// Selected k per base space.
    pub base_k: Vec<usize>,
    pub meta_k: usize,
    /// Class index -> original label name.
    pub label_names: Vec<String>,
    /// Per space: the training feature matrix.
    pub training_features: Vec<Vec<Vec<f64>>>,
    pub training_labels: Vec<usize>,
    /// Per space: N x C leave-one-out membership matrix.
    pub base_loo: Vec<Vec<MembershipVector>>,
    /// N x CJ fused training matrix; row i is the classifier-major
    /// concatenation of the per-space LOO rows of sample i.
    pub fused_training: Vec<Vec<f64>>,
}

/// One classified sample with the full decision trail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub predicted: usize,
    pub meta_membership: MembershipVector,
    pub base_memberships: Vec<MembershipVector>,
    pub base_crisp: Vec<usize>,
}

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    model: FsgModel,
}

impl FsgModel {
    /// Trains the full ensemble: per space, select k and compute the
    /// leave-one-out membership matrix; concatenate into the fused
    /// training matrix; select the meta k over that matrix.
    pub fn train(
        training: &LabeledDataset,
        fuzzifier: f64,
        k_policy: KPolicy,
        seed: RngSeed,
    ) -> Result<FsgModel> {
        let violations = training.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidDataset(
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            ));
        }
        let c = training.num_classes;
        let labels = training.labels();
        let n = labels.len();

        let mut training_features = Vec::new();
        let mut base_k = Vec::new();
        let mut base_loo = Vec::new();
        for j in 0..training.num_spaces() {
            let features = training.space_features(j);
            let k = match k_policy {
                KPolicy::Fixed(k) => k,
                KPolicy::Auto => fuzzy_knn::select_k(
                    &features,
                    &labels,
                    c,
                    fuzzifier,
                    seed.for_stage(j as u64),
                )?,
            };
            let cfg = FuzzyKnnConfig::new(k, fuzzifier, c)?;
            base_loo.push(fuzzy_knn::loo_memberships(&features, &labels, &cfg)?);
            training_features.push(features);
            base_k.push(k);
        }

        let mut fused_training = Vec::with_capacity(n);
        for i in 0..n {
            let blocks: Vec<MembershipVector> =
                base_loo.iter().map(|rows| rows[i].clone()).collect();
            fused_training.push(FusionVector::concat(&blocks)?.values().to_vec());
        }

        let meta_k = match k_policy {
            KPolicy::Fixed(k) => k,
            KPolicy::Auto => fuzzy_knn::select_k(
                &fused_training,
                &labels,
                c,
                fuzzifier,
                seed.for_stage(u64::MAX / 2),
            )?,
        };

        let label_names = (0..c).map(|i| i.to_string()).collect();
        Ok(FsgModel {
            num_classes: c,
            space_dims: training.space_dims.clone(),
            fuzzifier,
            base_k,
            meta_k,
            label_names,
            training_features,
            training_labels: labels,
            base_loo,
            fused_training,
        })
    }

    /// Classifies test samples given as (id, per-space features)
    /// pairs. Base memberships are computed against the full training
    /// set (leave-one-out applies only to the training side), fused,
    /// and classified by the meta-layer fuzzy k-NN.
    pub fn classify<S: AsRef<str> + Sync>(
        &self,
        samples: &[(S, Vec<Vec<f64>>)],
    ) -> Result<Vec<Prediction>> {
        samples
            .par_iter()
            .map(|(id, features)| self.classify_one(id.as_ref(), features))
            .collect()
    }

    /// Classifies every sample of a dataset (labels ignored).
    pub fn classify_dataset(&self, data: &LabeledDataset) -> Result<Vec<Prediction>> {
        data.samples
            .par_iter()
            .map(|s| self.classify_one(&s.id, &s.features))
            .collect()
    }

    fn classify_one(&self, id: &str, features: &[Vec<f64>]) -> Result<Prediction> {
        if features.len() != self.space_dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.space_dims.len(),
                got: features.len(),
            });
        }
        let mut base_memberships = Vec::with_capacity(self.space_dims.len());
        for (j, query) in features.iter().enumerate() {
            if query.len() != self.space_dims[j] {
                return Err(Error::DimensionMismatch {
                    expected: self.space_dims[j],
                    got: query.len(),
                });
            }
            let cfg = FuzzyKnnConfig::new(self.base_k[j], self.fuzzifier, self.num_classes)?;
            base_memberships.push(fuzzy_knn::classify_query(
                query,
                &self.training_features[j],
                &self.training_labels,
                &cfg,
            )?);
        }
        let fusion = FusionVector::concat(&base_memberships)?;
        let meta_cfg = FuzzyKnnConfig::new(self.meta_k, self.fuzzifier, self.num_classes)?;
        let meta_membership = fuzzy_knn::classify_query(
            fusion.values(),
            &self.fused_training,
            &self.training_labels,
            &meta_cfg,
        )?;
        let base_crisp = base_memberships.iter().map(fuzzy_knn::predict_crisp).collect();
        Ok(Prediction {
            id: id.to_string(),
            predicted: fuzzy_knn::predict_crisp(&meta_membership),
            meta_membership,
            base_memberships,
            base_crisp,
        })
    }

    /// Training-side accuracy of base classifier `j`, from its
    /// leave-one-out membership rows.
    pub fn base_training_accuracy(&self, j: usize) -> f64 {
        let hits = self.base_loo[j]
            .iter()
            .zip(&self.training_labels)
            .filter(|(m, &y)| fuzzy_knn::predict_crisp(m) == y)
            .count();
        hits as f64 / self.training_labels.len() as f64
    }

    /// Crisp training-side predictions of base classifier `j`.
    pub fn base_training_predictions(&self, j: usize) -> Vec<usize> {
        self.base_loo[j].iter().map(fuzzy_knn::predict_crisp).collect()
    }

    pub fn num_spaces(&self) -> usize {
        self.space_dims.len()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile { version: MODEL_FORMAT_VERSION, model: self.clone() };
        let writer = BufWriter::new(File::create(path)?);
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<FsgModel> {
        let reader = BufReader::new(File::open(path)?);
        let file: ModelFile = serde_json::from_reader(reader)?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model format version {}",
                file.version
            )));
        }
        Ok(file.model)
    }
}

/// Fraction of exact label matches.
pub fn performance(predictions: &[Prediction], truth: &[usize]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predictions.len() });
    }
    if predictions.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let hits = predictions.iter().zip(truth).filter(|(p, &y)| p.predicted == y).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Per-class accuracy; `None` marks a class absent from `truth`.
pub fn per_class_performance(
    predictions: &[Prediction],
    truth: &[usize],
    num_classes: usize,
) -> Result<Vec<Option<f64>>> {
    if predictions.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predictions.len() });
    }
    let mut hits = vec![0usize; num_classes];
    let mut totals = vec![0usize; num_classes];
    for (p, &y) in predictions.iter().zip(truth) {
        if y >= num_classes {
            return Err(Error::InvalidDataset(format!("label {y} out of range")));
        }
        totals[y] += 1;
        if p.predicted == y {
            hits[y] += 1;
        }
    }
    Ok((0..num_classes)
        .map(|c| (totals[c] > 0).then(|| hits[c] as f64 / totals[c] as f64))
        .collect())
}

/// Same accuracy over crisp labels, for base-layer predictions.
pub fn crisp_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predicted.len() });
    }
    let hits = predicted.iter().zip(truth).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Per-class accuracy over crisp labels.
pub fn crisp_per_class_accuracy(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
) -> Result<Vec<Option<f64>>> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predicted.len() });
    }
    let mut hits = vec![0usize; num_classes];
    let mut totals = vec![0usize; num_classes];
    for (&p, &y) in predicted.iter().zip(truth) {
        totals[y] += 1;
        if p == y {
            hits[y] += 1;
        }
    }
    Ok((0..num_classes)
        .map(|c| (totals[c] > 0).then(|| hits[c] as f64 / totals[c] as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabeledSample;
    use rand::Rng;

    fn blob_dataset(seed: u64, per_class: usize, centers: &[[f64; 2]], spaces: usize) -> LabeledDataset {
        let mut rng = RngSeed(seed).rng();
        let mut samples = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for i in 0..per_class {
                let features = (0..spaces)
                    .map(|_| {
                        vec![
                            center[0] + rng.gen_range(-1.0..1.0),
                            center[1] + rng.gen_range(-1.0..1.0),
                        ]
                    })
                    .collect();
                samples.push(LabeledSample { id: format!("c{c}i{i}"), label: c, features });
            }
        }
        LabeledDataset { samples, num_classes: centers.len(), space_dims: vec![2; spaces] }
    }

    #[test]
    fn fused_rows_match_loo_blocks() {
        let data = blob_dataset(5, 12, &[[0.0, 0.0], [6.0, 6.0], [0.0, 6.0]], 3);
        let model = FsgModel::train(&data, 2.0, KPolicy::Fixed(3), RngSeed(1)).unwrap();
        let c = model.num_classes;
        for i in 0..data.num_samples() {
            for j in 0..model.num_spaces() {
                assert_eq!(
                    &model.fused_training[i][j * c..(j + 1) * c],
                    model.base_loo[j][i].values()
                );
            }
            let total: f64 = model.fused_training[i].iter().sum();
            assert!((total - model.num_spaces() as f64).abs() <= 1e-8);
        }
    }

    #[test]
    fn single_space_degenerates_to_decision_space_knn() {
        let data = blob_dataset(6, 15, &[[0.0, 0.0], [8.0, 8.0]], 1);
        let model = FsgModel::train(&data, 2.0, KPolicy::Fixed(3), RngSeed(2)).unwrap();
        assert_eq!(model.fused_training[0].len(), model.num_classes);
        let preds = model.classify_dataset(&data).unwrap();
        let acc = performance(&preds, &data.labels()).unwrap();
        assert!(acc > 0.9, "single-space ensemble should still classify blobs, got {acc}");
    }

    #[test]
    fn fusion_dimension_is_c_times_j() {
        // 12 classes x 7 spaces -> 84-dimensional fusion rows
        let centers: Vec<[f64; 2]> = (0..12).map(|c| [(c as f64) * 10.0, 0.0]).collect();
        let data = blob_dataset(7, 4, &centers, 7);
        let model = FsgModel::train(&data, 2.0, KPolicy::Fixed(1), RngSeed(3)).unwrap();
        assert_eq!(model.fused_training[0].len(), 84);
    }

    #[test]
    fn training_sample_with_meta_k1_reproduces_its_label() {
        let data = blob_dataset(8, 10, &[[0.0, 0.0], [7.0, 7.0]], 2);
        let model = FsgModel::train(&data, 2.0, KPolicy::Fixed(1), RngSeed(4)).unwrap();
        let preds = model.classify_dataset(&data).unwrap();
        // Fusion rows are distinct with overwhelming probability, so a
        // training sample lands on itself in the fusion space only if
        // its test-side fusion row matches; with k=1 and separable
        // blobs the label must come back.
        let labels = data.labels();
        let acc = performance(&preds, &labels).unwrap();
        assert_eq!(acc, 1.0);
        for p in &preds {
            let total: f64 = p.meta_membership.values().iter().sum();
            assert!((total - 1.0).abs() <= 1e-9);
            assert_eq!(p.predicted, p.meta_membership.argmax());
        }
    }

    #[test]
    fn permuting_spaces_leaves_predictions_unchanged() {
        let data = blob_dataset(9, 12, &[[0.0, 0.0], [5.0, 5.0], [5.0, 0.0]], 3);
        let (train, test) = data.stratified_split(0.5, RngSeed(10));
        let model = FsgModel::train(&train, 2.0, KPolicy::Fixed(3), RngSeed(1)).unwrap();

        // Same dataset with spaces reordered (2, 0, 1).
        let perm = [2usize, 0, 1];
        let permute = |d: &LabeledDataset| LabeledDataset {
            samples: d
                .samples
                .iter()
                .map(|s| LabeledSample {
                    id: s.id.clone(),
                    label: s.label,
                    features: perm.iter().map(|&j| s.features[j].clone()).collect(),
                })
                .collect(),
            num_classes: d.num_classes,
            space_dims: perm.iter().map(|&j| d.space_dims[j]).collect(),
        };
        let model_p = FsgModel::train(&permute(&train), 2.0, KPolicy::Fixed(3), RngSeed(1)).unwrap();

        let preds = model.classify_dataset(&test).unwrap();
        let preds_p = model_p.classify_dataset(&permute(&test)).unwrap();
        for (a, b) in preds.iter().zip(&preds_p) {
            assert_eq!(a.predicted, b.predicted);
            // fusion blocks permute with the spaces
            for (j, &pj) in perm.iter().enumerate() {
                assert_eq!(a.base_memberships[pj].values(), b.base_memberships[j].values());
            }
        }
    }

    #[test]
    fn performance_counts() {
        let mk = |pred: usize| Prediction {
            id: String::new(),
            predicted: pred,
            meta_membership: MembershipVector::one_hot(pred, 2),
            base_memberships: vec![],
            base_crisp: vec![],
        };
        let preds = vec![mk(0), mk(1), mk(0), mk(0)];
        assert_eq!(performance(&preds, &[0, 1, 0, 1]).unwrap(), 0.75);
        assert_eq!(performance(&preds, &[1, 0, 1, 1]).unwrap(), 0.0);
        assert_eq!(performance(&preds, &[0, 1, 0, 0]).unwrap(), 1.0);
        assert!(performance(&preds, &[0, 1]).is_err());
    }

    #[test]
    fn per_class_performance_flags_absent_class() {
        let mk = |pred: usize| Prediction {
            id: String::new(),
            predicted: pred,
            meta_membership: MembershipVector::one_hot(pred, 3),
            base_memberships: vec![],
            base_crisp: vec![],
        };
        let preds = vec![mk(1), mk(1), mk(2)];
        let per = per_class_performance(&preds, &[0, 1, 2], 3).unwrap();
        assert_eq!(per, vec![Some(0.0), Some(1.0), Some(1.0)]);
        let per = per_class_performance(&preds, &[1, 1, 1], 3).unwrap();
        assert_eq!(per[0], None);
        assert_eq!(per[2], None);
    }

    #[test]
    fn model_round_trips_through_file() {
        let data = blob_dataset(12, 8, &[[0.0, 0.0], [6.0, 6.0]], 2);
        let model = FsgModel::train(&data, 2.0, KPolicy::Fixed(2), RngSeed(9)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = FsgModel::load(&path).unwrap();
        assert_eq!(model, loaded);
    }
}
