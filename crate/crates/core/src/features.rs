//! Review featurization: the eight lexicon features, negation scope and
//! n-gram counts, plus the vocabulary that maps n-grams to columns.
//!
//! A vectorized review is laid out as `[n-gram columns | dense block]` where
//! the dense block, when enabled, always occupies the final eight columns in
//! the order `pow, ngw, pot, ngt, negw, pocp, ngcp, lr`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Polarity};
use crate::digest::Fingerprint;
use crate::lexicon::{NegationLexicon, ObjectiveLexicon, SentimentLexicon, Tendency};
use crate::textproc::{self, NormalizationConfig};

/// Tokens after a negation word whose sentiment polarity is reversed.
pub const NEGATION_SCOPE: usize = 3;

/// Number of dense lexicon features.
pub const DENSE_LEN: usize = 8;

pub const DENSE_NAMES: [&str; DENSE_LEN] = ["pow", "ngw", "pot", "ngt", "negw", "pocp", "ngcp", "lr"];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid n-gram orders: {0}")]
    Ngram(String),
    #[error("unknown feature mode {0:?} (expected baseline1, baseline2 or proposed)")]
    Mode(String),
    #[error("feature mode {mode} requires a {what}")]
    MissingResource { mode: FeatureMode, what: &'static str },
    #[error("n-gram features requested but no vocabulary has been fitted")]
    NotFitted,
    #[error("vocabulary file line {line}: {message}")]
    VocabParse { line: usize, message: String },
    #[error("feature file line {line}: {message}")]
    MatrixParse { line: usize, message: String },
}

impl FeatureError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FeatureError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Role of a residual token after negation handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenRole {
    Negation,
    Sentiment {
        prior: Polarity,
        effective: Polarity,
    },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    pub surface: String,
    pub role: TokenRole,
}

/// Reverses the polarity of every sentiment word within
/// [`NEGATION_SCOPE`] tokens after a negation word. A word inside two
/// overlapping scopes is flipped once; negation words are never targets.
pub fn apply_negation<T: AsRef<str>>(
    tokens: &[T],
    slex: &SentimentLexicon,
    nlex: &NegationLexicon,
) -> Vec<AnnotatedToken> {
    let mut out: Vec<AnnotatedToken> = tokens
        .iter()
        .map(|t| {
            let s = t.as_ref();
            let role = if nlex.contains(s) {
                TokenRole::Negation
            } else if let Some(p) = slex.word_polarity(s) {
                TokenRole::Sentiment {
                    prior: p,
                    effective: p,
                }
            } else {
                TokenRole::Other
            };
            AnnotatedToken {
                surface: s.to_string(),
                role,
            }
        })
        .collect();
    let mut flipped = vec![false; out.len()];
    for i in 0..out.len() {
        if out[i].role != TokenRole::Negation {
            continue;
        }
        let end = (i + NEGATION_SCOPE).min(out.len() - 1);
        for j in i + 1..=end {
            if let TokenRole::Sentiment { prior, .. } = out[j].role {
                if !flipped[j] {
                    flipped[j] = true;
                    out[j].role = TokenRole::Sentiment {
                        prior,
                        effective: prior.flipped(),
                    };
                }
            }
        }
    }
    out
}

/// The lexicon feature block of one review.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentimentFeatures {
    /// Positive sentiment words after negation.
    pub pow: u32,
    /// Negative sentiment words after negation.
    pub ngw: u32,
    /// Objective words with positive tendency.
    pub pot: u32,
    /// Objective words with negative tendency.
    pub ngt: u32,
    pub negw: u32,
    /// `+1` if a positive phrase occurs, else `-1`.
    pub pocp: i8,
    /// `+1` if a negative phrase occurs, else `-1`.
    pub ngcp: i8,
    /// Token count before phrase removal.
    pub lr: u32,
}

impl Default for SentimentFeatures {
    fn default() -> Self {
        SentimentFeatures {
            pow: 0,
            ngw: 0,
            pot: 0,
            ngt: 0,
            negw: 0,
            pocp: -1,
            ngcp: -1,
            lr: 0,
        }
    }
}

impl SentimentFeatures {
    pub fn to_array(&self) -> [f64; DENSE_LEN] {
        [
            self.pow as f64,
            self.ngw as f64,
            self.pot as f64,
            self.ngt as f64,
            self.negw as f64,
            self.pocp as f64,
            self.ngcp as f64,
            self.lr as f64,
        ]
    }
}

/// Computes the lexicon features of a normalized token sequence.
///
/// Phrases are matched first; negation and word counts run on the residual
/// tokens. Objective words are only counted when `olex` is given.
pub fn extract_sentiment_features<T: AsRef<str>>(
    tokens: &[T],
    slex: &SentimentLexicon,
    olex: Option<&ObjectiveLexicon>,
    nlex: &NegationLexicon,
) -> SentimentFeatures {
    let phrases = slex.match_phrases(tokens);
    sentiment_features_from_residual(tokens.len(), &phrases, slex, olex, nlex)
}

fn sentiment_features_from_residual(
    total_tokens: usize,
    phrases: &crate::lexicon::PhraseMatches,
    slex: &SentimentLexicon,
    olex: Option<&ObjectiveLexicon>,
    nlex: &NegationLexicon,
) -> SentimentFeatures {
    let flag = |p| if phrases.has(p) { 1 } else { -1 };
    let mut f = SentimentFeatures {
        pocp: flag(Polarity::Positive),
        ngcp: flag(Polarity::Negative),
        lr: total_tokens as u32,
        ..Default::default()
    };
    for tok in apply_negation(&phrases.residual, slex, nlex) {
        match tok.role {
            TokenRole::Negation => f.negw += 1,
            TokenRole::Sentiment { effective, .. } => match effective {
                Polarity::Positive => f.pow += 1,
                Polarity::Negative => f.ngw += 1,
            },
            TokenRole::Other => match olex.and_then(|o| o.tendency(&tok.surface)) {
                Some(Tendency::Positive) => f.pot += 1,
                Some(Tendency::Negative) => f.ngt += 1,
                _ => {}
            },
        }
    }
    f
}

/// Which n-gram orders to count. Weights are raw occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct NgramConfig {
    orders: Vec<usize>,
}

impl NgramConfig {
    pub const MAX_ORDER: usize = 4;

    pub fn new(orders: impl IntoIterator<Item = usize>) -> Result<Self, FeatureError> {
        let set: BTreeSet<usize> = orders.into_iter().collect();
        if set.is_empty() {
            return Err(FeatureError::Ngram("at least one order is required".into()));
        }
        if let Some(bad) = set.iter().find(|&&n| n == 0 || n > Self::MAX_ORDER) {
            return Err(FeatureError::Ngram(format!(
                "order {bad} outside 1..={}",
                Self::MAX_ORDER
            )));
        }
        Ok(NgramConfig {
            orders: set.into_iter().collect(),
        })
    }

    pub fn unigram() -> Self {
        NgramConfig { orders: vec![1] }
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }
}

impl TryFrom<Vec<usize>> for NgramConfig {
    type Error = FeatureError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        NgramConfig::new(v)
    }
}

impl From<NgramConfig> for Vec<usize> {
    fn from(c: NgramConfig) -> Self {
        c.orders
    }
}

impl fmt::Display for NgramConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for NgramConfig {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let orders = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| FeatureError::Ngram(format!("bad order {p:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        NgramConfig::new(orders)
    }
}

/// Feature id of an n-gram: `"{n}:{tok1}_{tok2}..."`.
pub fn ngram_id<T: AsRef<str>>(window: &[T]) -> String {
    let body: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
    format!("{}:{}", window.len(), body.join("_"))
}

/// Counts every contiguous window of each configured order.
pub fn extract_ngrams<T: AsRef<str>>(tokens: &[T], config: &NgramConfig) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for &n in &config.orders {
        for window in tokens.windows(n) {
            *counts.entry(ngram_id(window)).or_insert(0) += 1;
        }
    }
    counts
}

/// Feature configurations compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// N-gram counts only; no lexicons.
    Baseline1,
    /// Six basic lexicon features (no objective tendency).
    Baseline2,
    /// Basic features plus positive/negative tendency counts.
    Proposed,
}

impl FeatureMode {
    pub fn uses_dense(self) -> bool {
        !matches!(self, FeatureMode::Baseline1)
    }

    pub fn uses_objective(self) -> bool {
        matches!(self, FeatureMode::Proposed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Baseline1 => "baseline1",
            FeatureMode::Baseline2 => "baseline2",
            FeatureMode::Proposed => "proposed",
        }
    }

    /// Names of the dense features this mode actually fills.
    pub fn dense_features(self) -> &'static [&'static str] {
        match self {
            FeatureMode::Baseline1 => &[],
            FeatureMode::Baseline2 => &["pow", "ngw", "negw", "pocp", "ngcp", "lr"],
            FeatureMode::Proposed => &DENSE_NAMES,
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "baseline1" | "unigram" | "ngrams" => Ok(FeatureMode::Baseline1),
            "baseline2" | "sentiment" => Ok(FeatureMode::Baseline2),
            "proposed" | "tendency" => Ok(FeatureMode::Proposed),
            _ => Err(FeatureError::Mode(s.to_string())),
        }
    }
}

/// Feature mode plus optional n-gram block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSet {
    pub mode: FeatureMode,
    pub ngrams: Option<NgramConfig>,
}

impl FeatureSet {
    pub fn new(mode: FeatureMode, ngrams: Option<NgramConfig>) -> Self {
        // Baseline 1 is an n-gram model by definition.
        let ngrams = match (mode, ngrams) {
            (FeatureMode::Baseline1, None) => Some(NgramConfig::unigram()),
            (_, n) => n,
        };
        FeatureSet { mode, ngrams }
    }

    pub fn label(&self) -> String {
        match (&self.ngrams, self.mode) {
            (Some(n), FeatureMode::Baseline1) => format!("ngrams[{n}]"),
            (Some(n), m) => format!("{m}+ngrams[{n}]"),
            (None, m) => m.to_string(),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Extracted (not yet indexed) features of one review.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector {
    pub dense: Option<SentimentFeatures>,
    pub ngrams: BTreeMap<String, u32>,
}

/// N-gram id → column index, fitted on a training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    config: Option<NgramConfig>,
    corpus_hash: String,
}

impl Vocabulary {
    /// Indexes the union of `documents`' n-grams in lexicographic order.
    pub fn from_documents<'a, I>(documents: I, config: Option<NgramConfig>, corpus_hash: String) -> Self
    where
        I: IntoIterator<Item = &'a BTreeMap<String, u32>>,
    {
        let mut all = BTreeSet::new();
        for doc in documents {
            all.extend(doc.keys().cloned());
        }
        Self::from_sorted_ids(all.into_iter().collect(), config, corpus_hash)
    }

    fn from_sorted_ids(ids: Vec<String>, config: Option<NgramConfig>, corpus_hash: String) -> Self {
        let index = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Vocabulary {
            ids,
            index,
            config,
            corpus_hash,
        }
    }

    pub fn empty() -> Self {
        Self::from_sorted_ids(Vec::new(), None, String::new())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, column: usize) -> Option<&str> {
        self.ids.get(column).map(String::as_str)
    }

    pub fn config(&self) -> Option<&NgramConfig> {
        self.config.as_ref()
    }

    /// Hash of the training corpus the vocabulary was fitted on.
    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    pub fn content_hash(&self) -> String {
        let mut fp = Fingerprint::new("vocabulary/v1");
        fp.field(
            &self
                .config
                .as_ref()
                .map(|c| c.to_string())
                .unwrap_or_default(),
        );
        for id in &self.ids {
            fp.field(id);
        }
        fp.finish()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "#! arsent-vocabulary\tversion=1\torders={}\tcorpus_hash={}\tsize={}\thash={}",
            self.config.as_ref().map(|c| c.to_string()).unwrap_or_default(),
            self.corpus_hash,
            self.ids.len(),
            self.content_hash()
        )?;
        for id in &self.ids {
            writeln!(w, "{id}")?;
        }
        w.flush()
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, FeatureError> {
        let mut lines = BufReader::new(reader).lines();
        let perr = |line, message: String| FeatureError::VocabParse { line, message };
        let header = lines
            .next()
            .ok_or_else(|| perr(1, "empty file".into()))?
            .map_err(|e| perr(1, e.to_string()))?;
        let mut fields = header.split('\t');
        if fields.next() != Some("#! arsent-vocabulary") {
            return Err(perr(1, "missing vocabulary header".into()));
        }
        let mut meta = HashMap::new();
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| perr(1, format!("bad header field {f:?}")))?;
            meta.insert(k.to_string(), v.to_string());
        }
        if meta.get("version").map(String::as_str) != Some("1") {
            return Err(perr(1, "unsupported vocabulary version".into()));
        }
        let config = match meta.get("orders").map(String::as_str) {
            None | Some("") => None,
            Some(s) => Some(s.parse().map_err(|e: FeatureError| perr(1, e.to_string()))?),
        };
        let size: usize = meta
            .get("size")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(1, "missing size".into()))?;
        let mut ids = Vec::with_capacity(size);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| perr(i + 2, e.to_string()))?;
            if let Some(prev) = ids.last() {
                if &line <= prev {
                    return Err(perr(i + 2, "ids must be strictly increasing".into()));
                }
            }
            ids.push(line);
        }
        if ids.len() != size {
            return Err(perr(
                ids.len() + 1,
                format!("expected {size} ids, found {} (truncated file?)", ids.len()),
            ));
        }
        let vocab = Self::from_sorted_ids(
            ids,
            config,
            meta.get("corpus_hash").cloned().unwrap_or_default(),
        );
        if let Some(h) = meta.get("hash") {
            if *h != vocab.content_hash() {
                return Err(perr(1, "content hash does not match ids".into()));
            }
        }
        Ok(vocab)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        let path = path.as_ref();
        Self::from_reader(File::open(path).map_err(|e| FeatureError::io(path, e))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FeatureError> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| FeatureError::io(path, e))?;
        self.write_to(BufWriter::new(f))
            .map_err(|e| FeatureError::io(path, e))
    }
}

/// Column-indexed feature row. Entries are sorted by column and nonzero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i] * v).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Dense copy, mostly for tests and small problems.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseRow {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }
}

/// The lexicons a featurizer may consult.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lexicons<'a> {
    pub sentiment: Option<&'a SentimentLexicon>,
    pub negation: Option<&'a NegationLexicon>,
    pub objective: Option<&'a ObjectiveLexicon>,
}

/// Turns raw review text into feature rows for one [`FeatureSet`].
#[derive(Debug, Clone)]
pub struct Featurizer<'a> {
    set: FeatureSet,
    norm: NormalizationConfig,
    sentiment: Option<&'a SentimentLexicon>,
    negation: &'a NegationLexicon,
    objective: Option<&'a ObjectiveLexicon>,
    vocab: Option<Vocabulary>,
}

static EMPTY_NEGATION: std::sync::OnceLock<NegationLexicon> = std::sync::OnceLock::new();

impl<'a> Featurizer<'a> {
    /// Checks that the lexicons required by `set.mode` are present. Lexicons
    /// a mode does not use are ignored.
    pub fn new(
        set: FeatureSet,
        norm: NormalizationConfig,
        lexicons: Lexicons<'a>,
    ) -> Result<Self, FeatureError> {
        let set = FeatureSet::new(set.mode, set.ngrams);
        if set.mode.uses_dense() && lexicons.sentiment.is_none() {
            return Err(FeatureError::MissingResource {
                mode: set.mode,
                what: "sentiment lexicon",
            });
        }
        if set.mode.uses_objective() && lexicons.objective.is_none() {
            return Err(FeatureError::MissingResource {
                mode: set.mode,
                what: "objective lexicon",
            });
        }
        let uses_lex = set.mode.uses_dense();
        Ok(Featurizer {
            sentiment: lexicons.sentiment.filter(|_| uses_lex),
            negation: lexicons
                .negation
                .filter(|_| uses_lex)
                .unwrap_or_else(|| EMPTY_NEGATION.get_or_init(NegationLexicon::new)),
            objective: lexicons.objective.filter(|_| set.mode.uses_objective()),
            set,
            norm,
            vocab: None,
        })
    }

    pub fn feature_set(&self) -> &FeatureSet {
        &self.set
    }

    pub fn normalization(&self) -> &NormalizationConfig {
        &self.norm
    }

    pub fn vocabulary(&self) -> Option<&Vocabulary> {
        self.vocab.as_ref()
    }

    /// Installs a previously fitted vocabulary.
    pub fn with_vocabulary(mut self, vocab: Vocabulary) -> Self {
        self.vocab = Some(vocab);
        self
    }

    /// Number of columns of a vectorized row.
    pub fn dim(&self) -> usize {
        self.vocab.as_ref().map_or(0, Vocabulary::len)
            + if self.set.mode.uses_dense() { DENSE_LEN } else { 0 }
    }

    pub fn vocab_hash(&self) -> String {
        self.vocab
            .as_ref()
            .map(Vocabulary::content_hash)
            .unwrap_or_else(|| Vocabulary::empty().content_hash())
    }

    /// Extracts the dense block and n-gram counts of `text`.
    pub fn extract(&self, text: &str) -> FeatureVector {
        let tokens = textproc::preprocess_words(text, &self.norm);
        match self.sentiment {
            Some(slex) => {
                let phrases = slex.match_phrases(&tokens);
                let mut dense = sentiment_features_from_residual(
                    tokens.len(),
                    &phrases,
                    slex,
                    self.objective,
                    self.negation,
                );
                if !self.set.mode.uses_objective() {
                    dense.pot = 0;
                    dense.ngt = 0;
                }
                let ngrams = self
                    .set
                    .ngrams
                    .as_ref()
                    .map(|c| extract_ngrams(&phrases.residual, c))
                    .unwrap_or_default();
                FeatureVector {
                    dense: Some(dense),
                    ngrams,
                }
            }
            None => FeatureVector {
                dense: None,
                ngrams: self
                    .set
                    .ngrams
                    .as_ref()
                    .map(|c| extract_ngrams(&tokens, c))
                    .unwrap_or_default(),
            },
        }
    }

    /// Fits the n-gram vocabulary on `train` and installs it.
    pub fn fit(&mut self, train: &Corpus) -> &Vocabulary {
        let vocab = match &self.set.ngrams {
            Some(cfg) => {
                let docs: Vec<BTreeMap<String, u32>> = train
                    .reviews()
                    .par_iter()
                    .map(|r| self.extract(&r.text).ngrams)
                    .collect();
                Vocabulary::from_documents(&docs, Some(cfg.clone()), train.content_hash())
            }
            None => Vocabulary {
                corpus_hash: train.content_hash(),
                ..Vocabulary::empty()
            },
        };
        self.vocab.insert(vocab)
    }

    /// Column-indexed row for `text`. Out-of-vocabulary n-grams are dropped.
    pub fn vectorize(&self, text: &str) -> Result<SparseRow, FeatureError> {
        let fv = self.extract(text);
        self.index(&fv)
    }

    pub fn index(&self, fv: &FeatureVector) -> Result<SparseRow, FeatureError> {
        let vocab_len = match (&self.set.ngrams, &self.vocab) {
            (Some(_), None) => return Err(FeatureError::NotFitted),
            (_, Some(v)) => v.len(),
            (None, None) => 0,
        };
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(fv.ngrams.len() + DENSE_LEN);
        if let Some(vocab) = &self.vocab {
            for (id, &count) in &fv.ngrams {
                if let Some(col) = vocab.get(id) {
                    entries.push((col, count as f64));
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
        }
        if let Some(dense) = &fv.dense {
            for (k, v) in dense.to_array().into_iter().enumerate() {
                if v != 0.0 {
                    entries.push((vocab_len + k, v));
                }
            }
        }
        Ok(SparseRow {
            dim: self.dim(),
            entries,
        })
    }

    /// Vectorizes every review of `corpus`, preserving order.
    pub fn vectorize_corpus(&self, corpus: &Corpus) -> Result<Vec<SparseRow>, FeatureError> {
        corpus
            .reviews()
            .par_iter()
            .map(|r| self.vectorize(&r.text))
            .collect()
    }
}

/// Writes rows as `label index:value ...` lines with 1-based columns.
pub fn write_feature_matrix<W: Write>(
    mut w: W,
    rows: &[SparseRow],
    labels: &[Polarity],
) -> std::io::Result<()> {
    for (row, label) in rows.iter().zip(labels) {
        w.write_all(if *label == Polarity::Positive { b"+1" } else { b"-1" })?;
        for &(i, v) in &row.entries {
            write!(w, " {}:{}", i + 1, v)?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Parses the output of [`write_feature_matrix`]. `dim` is the column count.
pub fn read_feature_matrix<R: Read>(
    reader: R,
    dim: usize,
) -> Result<(Vec<SparseRow>, Vec<Polarity>), FeatureError> {
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| FeatureError::MatrixParse {
            line: line_no,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = match parts.next() {
            Some("+1") | Some("1") => Polarity::Positive,
            Some("-1") => Polarity::Negative,
            other => return Err(err(format!("bad label {other:?}"))),
        };
        let mut entries = Vec::new();
        for p in parts {
            let (i, v) = p
                .split_once(':')
                .ok_or_else(|| err(format!("bad pair {p:?}")))?;
            let i: usize = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
            let v: f64 = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
            if i == 0 || i > dim {
                return Err(err(format!("index {i} outside 1..={dim}")));
            }
            if entries.last().is_some_and(|&(prev, _)| prev >= i - 1) {
                return Err(err("indices must be strictly increasing".into()));
            }
            entries.push((i - 1, v));
        }
        rows.push(SparseRow { dim, entries });
        labels.push(label);
    }
    Ok((rows, labels))
}
