//! Fuzzy Stacked Generalization (FSG).
//!
//! An ensemble classifier built from two layers of fuzzy k-NN. Each
//! base-layer classifier runs on one feature space and emits a class
//! membership vector (a point on the probability simplex) instead of a
//! crisp label. The membership vectors of all base classifiers are
//! concatenated into a fusion vector, and a meta-layer fuzzy k-NN
//! classifies in that fusion space. The Euclidean distance between
//! fusion vectors realizes a learned decision-space distance that
//! shrinks the gap between finite-sample and asymptotic nearest
//! neighbor error.
//!
//! The crate ships:
//! - the two-layer pipeline ([`stacking`]),
//! - the single-space fuzzy k-NN engine ([`fuzzy_knn`]),
//! - error-difference and ensemble-diversity diagnostics ([`analysis`]),
//! - a synthetic Gaussian benchmark generator with checked-in mean
//!   fixtures ([`synthetic`]),
//! - histogram-based entropy estimation over decision and fusion
//!   spaces ([`entropy`]),
//! - CSV ingestion and experiment orchestration ([`io`], [`experiment`]).
//!
//! See the `examples/` directory for one runnable program per major
//! capability; the thin `fsg` binary exposes the same operations as
//! subcommands.

pub mod analysis;
pub mod dataset;
pub mod entropy;
pub mod experiment;
pub mod fuzzy_knn;
pub mod io;
pub mod stacking;
pub mod synthetic;

mod error;

pub use dataset::{FusionVector, LabeledDataset, LabeledSample, MembershipVector, RngSeed};
pub use error::Error;
pub use fuzzy_knn::FuzzyKnnConfig;
pub use stacking::{FsgModel, KPolicy, Prediction};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
