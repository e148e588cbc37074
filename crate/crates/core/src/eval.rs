//! Metrics, experiment runs and report rendering.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{self, LinearModel, ModelError, TrainConfig, TrainSummary};
use crate::corpus::{self, Corpus, CorpusError, Polarity, SplitSpec};
use crate::features::{FeatureError, FeatureMode, FeatureSet, Featurizer, Lexicons, NgramConfig, Vocabulary};
use crate::lexicon::{
    build_objective_lexicon, FilterList, LexiconError, NegationLexicon, ObjectiveConfig, ObjectiveLexicon,
    SentimentLexicon,
};
use crate::textproc::NormalizationConfig;

mod synthetic;

pub use synthetic::{generate_synthetic, SyntheticData, SyntheticSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error("experiment `{name}`: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<EvalError>,
    },
    #[error("cannot generate synthetic corpus: {0}")]
    Synthetic(String),
    #[error("rerun does not match manifest: {0}")]
    Rerun(String),
}

impl EvalError {
    fn in_experiment(self, name: &str) -> Self {
        EvalError::Experiment {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}

/// Binary confusion counts with Positive as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    /// Tallies `(truth, prediction)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Polarity, Polarity)>) -> Self {
        let mut m = ConfusionMatrix::default();
        for (truth, pred) in pairs {
            m.record(truth, pred);
        }
        m
    }

    pub fn record(&mut self, truth: Polarity, pred: Polarity) {
        use Polarity::*;
        match (truth, pred) {
            (Positive, Positive) => self.tp += 1,
            (Negative, Negative) => self.tn += 1,
            (Negative, Positive) => self.fp += 1,
            (Positive, Negative) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// NaN on an empty matrix.
    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// NaN when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// NaN when the test set has no positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub experiment: String,
    pub features: String,
    #[serde(with = "nan_as_null")]
    pub accuracy: f64,
    #[serde(with = "nan_as_null")]
    pub precision: f64,
    #[serde(with = "nan_as_null")]
    pub recall: f64,
    pub matrix: ConfusionMatrix,
}

impl PartialEq for EvalReport {
    fn eq(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        self.experiment == other.experiment
            && self.features == other.features
            && self.matrix == other.matrix
            && same(self.accuracy, other.accuracy)
            && same(self.precision, other.precision)
            && same(self.recall, other.recall)
    }
}

impl EvalReport {
    /// Derives the metrics from `matrix`, warning about undefined ones.
    pub fn from_matrix(experiment: impl Into<String>, features: impl Into<String>, matrix: ConfusionMatrix) -> Self {
        let experiment = experiment.into();
        let report = EvalReport {
            accuracy: matrix.accuracy(),
            precision: matrix.precision(),
            recall: matrix.recall(),
            experiment,
            features: features.into(),
            matrix,
        };
        if report.precision.is_nan() {
            log::warn!("{}: precision undefined (no positive predictions)", report.experiment);
        }
        if report.recall.is_nan() {
            log::warn!("{}: recall undefined (no positive reviews)", report.experiment);
        }
        report
    }
}

/// Scores `model` on `test`. The featurizer must carry the vocabulary the
/// model was trained with.
pub fn evaluate(
    model: &LinearModel,
    test: &Corpus,
    featurizer: &Featurizer<'_>,
    experiment: &str,
) -> Result<EvalReport, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    model.check_vocab(&featurizer.vocab_hash())?;
    let rows = featurizer.vectorize_corpus(test)?;
    let mut matrix = ConfusionMatrix::default();
    for (row, review) in rows.iter().zip(test) {
        matrix.record(review.label, model.predict(row)?);
    }
    Ok(EvalReport::from_matrix(
        experiment,
        featurizer.feature_set().label(),
        matrix,
    ))
}

fn pct(v: f64) -> String {
    if v.is_nan() {
        "n/a".to_string()
    } else {
        format!("{:.2}", 100.0 * v)
    }
}

/// Aligned text table of percentages. The last column is the accuracy
/// difference to the first row.
pub fn render_table(reports: &[EvalReport]) -> String {
    let header = ["Experiment", "Accuracy", "Precision", "Recall", "ΔAccuracy"];
    let base = reports.first().map(|r| r.accuracy);
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            let delta = match base {
                Some(b) if !(b.is_nan() || r.accuracy.is_nan()) => format!("{:+.2}", 100.0 * (r.accuracy - b)),
                _ => "n/a".to_string(),
            };
            [r.experiment.clone(), pct(r.accuracy), pct(r.precision), pct(r.recall), delta]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: [&str; 5]| {
        let mut parts = Vec::with_capacity(5);
        for (k, cell) in cells.iter().enumerate() {
            let pad = widths[k] - cell.chars().count();
            if k == 0 {
                parts.push(format!("{cell}{}", " ".repeat(pad)));
            } else {
                parts.push(format!("{}{cell}", " ".repeat(pad)));
            }
        }
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for row in &rows {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3], &row[4]]);
    }
    out
}

/// One JSON object per line.
pub fn render_json_lines(reports: &[EvalReport]) -> String {
    reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("report serializes") + "\n")
        .collect()
}

/// Everything needed to reproduce one train/evaluate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub features: FeatureSet,
    pub split: SplitSpec,
    pub train: TrainConfig,
    pub objective: ObjectiveConfig,
    pub normalization: NormalizationConfig,
    /// Build the objective lexicon from the whole corpus, test side included.
    pub lexicon_from_full_corpus: bool,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, features: FeatureSet) -> Self {
        ExperimentSpec {
            name: name.into(),
            features: FeatureSet::new(features.mode, features.ngrams),
            split: SplitSpec::default(),
            train: TrainConfig::default(),
            objective: ObjectiveConfig::default(),
            normalization: NormalizationConfig::default(),
            lexicon_from_full_corpus: false,
        }
    }

    /// Copy of `self` with another name and feature set.
    pub fn with_features(&self, name: impl Into<String>, features: FeatureSet) -> Self {
        ExperimentSpec {
            name: name.into(),
            features: FeatureSet::new(features.mode, features.ngrams),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        self.normalization
            .validate()
            .map_err(|e| EvalError::Config(e.to_string()))?;
        self.objective.validate()?;
        self.train.validate()?;
        Ok(())
    }
}

/// The three rows of the baseline comparison: unigrams, sentiment features,
/// sentiment features with objective tendency.
pub fn comparison_grid(base: &ExperimentSpec) -> Vec<ExperimentSpec> {
    vec![
        base.with_features("unigram", FeatureSet::new(FeatureMode::Baseline1, None)),
        base.with_features("sentiment features", FeatureSet::new(FeatureMode::Baseline2, None)),
        base.with_features("sentiment + tendency", FeatureSet::new(FeatureMode::Proposed, None)),
    ]
}

/// Proposed features combined with each n-gram order set.
pub fn ngram_grid(base: &ExperimentSpec) -> Vec<ExperimentSpec> {
    const ROWS: [&[usize]; 6] = [&[1], &[2], &[3], &[1, 2], &[1, 2, 3], &[1, 2, 3, 4]];
    ROWS.iter()
        .map(|orders| {
            let cfg = NgramConfig::new(orders.iter().copied()).expect("valid orders");
            base.with_features(
                format!("proposed + ngrams[{cfg}]"),
                FeatureSet::new(FeatureMode::Proposed, Some(cfg)),
            )
        })
        .collect()
}

/// Lexicons available to an experiment.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub sentiment: Option<SentimentLexicon>,
    pub negation: Option<NegationLexicon>,
    pub filter: Option<FilterList>,
}

/// Hashes of every input an experiment read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub features: String,
    pub spec_hash: String,
    pub corpus_hash: String,
    pub train_hash: String,
    pub test_hash: String,
    pub objective_source_hash: Option<String>,
    pub objective_hash: Option<String>,
    pub vocab_source_hash: String,
    pub vocab_hash: String,
    pub model_hash: String,
    pub epochs: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: EvalReport,
    pub record: RunRecord,
    pub model: LinearModel,
    pub vocabulary: Vocabulary,
    pub objective: Option<ObjectiveLexicon>,
    pub summary: TrainSummary,
}

fn spec_hash(spec: &ExperimentSpec) -> String {
    crate::digest::sha256_hex(serde_json::to_string(spec).expect("spec serializes").as_bytes())
}

/// Split, build lexicons, featurize, train and evaluate.
pub fn run_experiment(
    spec: &ExperimentSpec,
    corpus: &Corpus,
    resources: &Resources,
) -> Result<ExperimentOutcome, EvalError> {
    run_inner(spec, corpus, resources).map_err(|e| e.in_experiment(&spec.name))
}

fn run_inner(spec: &ExperimentSpec, corpus: &Corpus, res: &Resources) -> Result<ExperimentOutcome, EvalError> {
    spec.validate()?;
    let mode = spec.features.mode;
    if !mode.uses_dense() && (res.sentiment.is_some() || res.negation.is_some()) {
        log::warn!("{}: {mode} uses no lexicons; supplied lexicons are ignored", spec.name);
    }
    let (train, test) = corpus::split(corpus, &spec.split)?;
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let empty_neg = NegationLexicon::new();
    let empty_filter = FilterList::new();
    let negation = res.negation.as_ref().unwrap_or(&empty_neg);
    let sentiment = if mode.uses_dense() {
        let s = res.sentiment.as_ref().ok_or(FeatureError::MissingResource {
            mode,
            what: "sentiment lexicon",
        })?;
        negation.check_disjoint(s)?;
        Some(s)
    } else {
        None
    };
    let objective_source = if spec.lexicon_from_full_corpus { corpus } else { &train };
    let objective = match (mode.uses_objective(), sentiment) {
        (true, Some(slex)) => Some(build_objective_lexicon(
            objective_source,
            slex,
            negation,
            res.filter.as_ref().unwrap_or(&empty_filter),
            &spec.objective,
            &spec.normalization,
        )?),
        _ => None,
    };
    let mut featurizer = Featurizer::new(
        spec.features.clone(),
        spec.normalization.clone(),
        Lexicons {
            sentiment,
            negation: Some(negation),
            objective: objective.as_ref(),
        },
    )?;
    let vocabulary = featurizer.fit(&train).clone();
    let train_hash = train.content_hash();
    if vocabulary.corpus_hash() != train_hash {
        return Err(EvalError::Config("vocabulary was not fitted on the training split".into()));
    }
    if let Some(o) = &objective {
        if !spec.lexicon_from_full_corpus && o.meta().corpus_hash != train_hash {
            return Err(EvalError::Config("objective lexicon was not built from the training split".into()));
        }
    }
    let rows = featurizer.vectorize_corpus(&train)?;
    let labels: Vec<Polarity> = train.iter().map(|r| r.label).collect();
    let dense_offset = mode.uses_dense().then(|| vocabulary.len());
    let (mut model, summary) = classifier::train_with_summary(&rows, &labels, dense_offset, &spec.train)?;
    model.meta.vocab_hash = featurizer.vocab_hash();
    model.meta.features = Some(featurizer.feature_set().clone());
    model.meta.normalization = Some(spec.normalization.clone());
    let report = evaluate(&model, &test, &featurizer, &spec.name)?;
    let record = RunRecord {
        name: spec.name.clone(),
        features: featurizer.feature_set().label(),
        spec_hash: spec_hash(spec),
        corpus_hash: corpus.content_hash(),
        train_hash: train_hash.clone(),
        test_hash: test.content_hash(),
        objective_source_hash: objective.as_ref().map(|o| o.meta().corpus_hash.clone()),
        objective_hash: objective.as_ref().map(ObjectiveLexicon::content_hash),
        vocab_source_hash: vocabulary.corpus_hash().to_string(),
        vocab_hash: featurizer.vocab_hash(),
        model_hash: model.content_hash(),
        epochs: summary.epochs,
        converged: summary.converged,
    };
    Ok(ExperimentOutcome {
        report,
        record,
        model,
        vocabulary,
        objective,
        summary,
    })
}

/// Runs `specs` in parallel; results keep the order of `specs`.
pub fn run_grid(
    specs: &[ExperimentSpec],
    corpus: &Corpus,
    resources: &Resources,
) -> Result<Vec<ExperimentOutcome>, EvalError> {
    specs
        .par_iter()
        .map(|s| run_experiment(s, corpus, resources))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub hash: String,
}

/// Paths and hashes of the files an experiment command read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub corpus: InputFile,
    pub sentiment: Option<InputFile>,
    pub negation: Option<InputFile>,
    pub filter: Option<InputFile>,
}

/// Written next to experiment reports; enough to rerun them exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub version: String,
    pub inputs: InputRecord,
    pub specs: Vec<ExperimentSpec>,
    pub runs: Vec<RunRecord>,
}

impl ExperimentManifest {
    pub fn new(inputs: InputRecord, specs: Vec<ExperimentSpec>, outcomes: &[ExperimentOutcome]) -> Self {
        ExperimentManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            specs,
            runs: outcomes.iter().map(|o| o.record.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        serde_json::from_str(text).map_err(|e| EvalError::Config(format!("bad manifest: {e}")))
    }

    /// Checks that `outcomes` of a rerun match the recorded runs.
    pub fn verify(&self, outcomes: &[ExperimentOutcome]) -> Result<(), EvalError> {
        if outcomes.len() != self.runs.len() {
            return Err(EvalError::Rerun(format!(
                "{} runs recorded, {} rerun",
                self.runs.len(),
                outcomes.len()
            )));
        }
        for (rec, out) in self.runs.iter().zip(outcomes) {
            if *rec != out.record {
                return Err(EvalError::Rerun(format!("run `{}` differs", rec.name)));
            }
        }
        Ok(())
    }
}
