//! Emergency-vehicle siren detection from short audio clips.
//!
//! The pipeline decodes WAV clips ([`ingest`]), summarises each clip as a
//! 28-dimensional MFCC/ZCR descriptor ([`features`]), balances the training
//! split with SMOTE ([`balance`]) and fits an extreme learning machine whose
//! output weights are solved in closed form ([`elm`]). A brute-force KNN
//! classifier ([`knn`]) serves as the comparison baseline and [`eval`] runs
//! the fold-wise cross-validation, timing and hidden-layer sweeps.

pub mod balance;
pub mod dataset;
pub mod elm;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod knn;
pub mod linalg;
pub mod synth;

pub use dataset::LabeledDataset;
pub use elm::{Activation, ElmConfig, ElmModel};
pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureVector, FrameConfig, MelFilterbank, Normalizer};
pub use ingest::AudioClip;
pub use knn::KnnModel;

/// Class index for urban background sounds.
pub const URBAN: usize = 0;
/// Class index for emergency-vehicle sirens.
pub const SIREN: usize = 1;

/// Class names indexed by label.
pub const CLASS_NAMES: [&str; 2] = ["urban", "siren"];
