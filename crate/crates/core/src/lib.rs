//! Polarity classification for colloquial Arabic reviews.
//!
//! The pipeline combines a curated sentiment lexicon (single words and
//! compound phrases) with an objective-word lexicon whose sentiment
//! *tendency* is induced from labeled reviews. Each review is reduced to
//! eight lexicon features plus optional n-gram counts and classified with a
//! linear soft-margin SVM.
//!
//! ```text
//! corpus ──► textproc ──► lexicon (phrases, objective tendency)
//!                              │
//!                              ▼
//!                          features ──► classifier ──► eval
//! ```
//!
//! The runnable programs under `examples/` walk through each stage; the
//! `arsent` binary wires the same stages into reproducible command-line runs.

pub mod classifier;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod lexicon;
pub mod textproc;

mod digest;

pub use classifier::{LinearModel, TrainConfig};
pub use corpus::{Corpus, Polarity, Review, SplitSpec};
pub use eval::{ConfusionMatrix, EvalReport, ExperimentSpec};
pub use features::{FeatureMode, FeatureSet, Featurizer, NgramConfig, SentimentFeatures};
pub use lexicon::{
    FilterList, NegationLexicon, ObjectiveConfig, ObjectiveLexicon, SentimentLexicon, Tendency,
};
pub use textproc::{NormalizationConfig, Token};
