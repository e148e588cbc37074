//! Sentiment, negation and filter lexicons, compound-phrase matching and the
//! objective-word tendency lexicon.
//!
//! An *objective* word is any corpus token that is not a sentiment word, not a
//! negation word and not on the filter list. Its tendency is the share of its
//! occurrences that fall in positive (`pt`) or negative (`nt`) reviews; a word
//! is labeled with a class once that share reaches the threshold.
//!
//! All lexicon files are UTF-8, tab-separated, one entry per line, with
//! `#`-prefixed comment lines.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Polarity};
use crate::digest::Fingerprint;
use crate::textproc::{self, NormalizationConfig};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("term {term:?} is listed as both positive and negative")]
    Conflict { term: String },
    #[error("term {raw:?} is empty after normalization")]
    EmptyTerm { raw: String },
    #[error("{kind} entry {term:?} must be a single token")]
    MultiToken { kind: &'static str, term: String },
    #[error("negation word {term:?} is also a sentiment word")]
    NegationOverlap { term: String },
    #[error("objective word {term:?} also appears in the {other}")]
    ObjectiveOverlap { term: String, other: &'static str },
    #[error("objective lexicon metadata: {0}")]
    Metadata(String),
    #[error("invalid builder config: {0}")]
    Config(String),
    #[error("cannot build objective lexicon: {0}")]
    Build(String),
    #[error("line {line}: word {word:?} stored as {stored} but its counts give {computed}")]
    TendencyMismatch {
        line: usize,
        word: String,
        stored: Tendency,
        computed: Tendency,
    },
}

impl LexiconError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        LexiconError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn normalize_term(raw: &str, config: &NormalizationConfig) -> Result<Vec<String>, LexiconError> {
    let words = textproc::preprocess_words(raw, config);
    if words.is_empty() {
        return Err(LexiconError::EmptyTerm {
            raw: raw.to_string(),
        });
    }
    Ok(words)
}

fn single_token(
    raw: &str,
    kind: &'static str,
    config: &NormalizationConfig,
) -> Result<String, LexiconError> {
    let mut words = normalize_term(raw, config)?;
    if words.len() != 1 {
        return Err(LexiconError::MultiToken {
            kind,
            term: raw.to_string(),
        });
    }
    Ok(words.pop().unwrap())
}

/// Iterates `(line number, content)` over non-blank, non-comment lines.
fn data_lines<R: Read>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, String), LexiconError>> {
    BufReader::new(reader)
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(LexiconError::Parse {
                line: i + 1,
                message: e.to_string(),
            })),
            Ok(l) => {
                let trimmed = l.trim_end_matches(['\r', '\n']);
                if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, trimmed.to_string())))
                }
            }
        })
}

fn open(path: &Path) -> Result<File, LexiconError> {
    File::open(path).map_err(|e| LexiconError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, LexiconError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| LexiconError::io(path, e))
}

/// A lexicon term with its prior polarity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentEntry {
    /// Normalized tokens joined by single spaces.
    pub term: String,
    pub polarity: Polarity,
    pub is_phrase: bool,
}

/// A phrase occurrence inside a token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseMatch {
    pub start: usize,
    pub len: usize,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhraseMatches {
    pub matches: Vec<PhraseMatch>,
    /// Input tokens not covered by any match, in order.
    pub residual: Vec<String>,
}

impl PhraseMatches {
    pub fn has(&self, polarity: Polarity) -> bool {
        self.matches.iter().any(|m| m.polarity == polarity)
    }
}

/// Opinion words and compound phrases.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentimentLexicon {
    words: HashMap<String, Polarity>,
    phrases: HashMap<String, Polarity>,
    phrase_heads: HashSet<String>,
    max_phrase_len: usize,
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a lexicon from raw terms, normalizing each with `config`.
    pub fn from_entries<I, S>(entries: I, config: &NormalizationConfig) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, Polarity)>,
        S: AsRef<str>,
    {
        let mut lex = SentimentLexicon::new();
        for (raw, polarity) in entries {
            lex.insert(raw.as_ref(), polarity, config)?;
        }
        Ok(lex)
    }

    /// Adds one term. Re-adding a term with the same polarity is a no-op.
    pub fn insert(
        &mut self,
        raw: &str,
        polarity: Polarity,
        config: &NormalizationConfig,
    ) -> Result<(), LexiconError> {
        let words = normalize_term(raw, config)?;
        let term = words.join(" ");
        let slot = if words.len() == 1 {
            &mut self.words
        } else {
            &mut self.phrases
        };
        match slot.get(&term) {
            Some(&p) if p != polarity => return Err(LexiconError::Conflict { term }),
            Some(_) => return Ok(()),
            None => {}
        }
        slot.insert(term, polarity);
        if words.len() > 1 {
            self.max_phrase_len = self.max_phrase_len.max(words.len());
            self.phrase_heads.insert(words[0].clone());
        }
        Ok(())
    }

    pub fn word_polarity(&self, word: &str) -> Option<Polarity> {
        self.words.get(word).copied()
    }

    pub fn phrase_polarity(&self, phrase: &str) -> Option<Polarity> {
        self.phrases.get(phrase).copied()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn phrase_count(&self) -> usize {
        self.phrases.len()
    }

    pub fn len(&self) -> usize {
        self.words.len() + self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.words.contains_key(term) || self.phrases.contains_key(term)
    }

    /// All entries sorted by term.
    pub fn entries(&self) -> Vec<SentimentEntry> {
        let mut out: Vec<SentimentEntry> = self
            .words
            .iter()
            .map(|(t, &p)| SentimentEntry {
                term: t.clone(),
                polarity: p,
                is_phrase: false,
            })
            .chain(self.phrases.iter().map(|(t, &p)| SentimentEntry {
                term: t.clone(),
                polarity: p,
                is_phrase: true,
            }))
            .collect();
        out.sort_by(|a, b| a.term.cmp(&b.term));
        out
    }

    /// Left-to-right, longest-first, non-overlapping phrase matching.
    pub fn match_phrases<T: AsRef<str>>(&self, tokens: &[T]) -> PhraseMatches {
        let mut out = PhraseMatches::default();
        let mut i = 0;
        while i < tokens.len() {
            let mut hit = None;
            if self.max_phrase_len >= 2 && self.phrase_heads.contains(tokens[i].as_ref()) {
                let longest = self.max_phrase_len.min(tokens.len() - i);
                for len in (2..=longest).rev() {
                    let candidate = tokens[i..i + len]
                        .iter()
                        .map(AsRef::as_ref)
                        .collect::<Vec<_>>()
                        .join(" ");
                    if let Some(&polarity) = self.phrases.get(&candidate) {
                        hit = Some(PhraseMatch {
                            start: i,
                            len,
                            polarity,
                        });
                        break;
                    }
                }
            }
            match hit {
                Some(m) => {
                    out.matches.push(m);
                    i += m.len;
                }
                None => {
                    out.residual.push(tokens[i].as_ref().to_string());
                    i += 1;
                }
            }
        }
        out
    }

    pub fn content_hash(&self) -> String {
        let mut fp = Fingerprint::new("sentiment-lexicon/v1");
        for e in self.entries() {
            fp.field(&e.term).field(e.polarity.as_str());
        }
        fp.finish()
    }

    pub fn from_reader<R: Read>(reader: R, config: &NormalizationConfig) -> Result<Self, LexiconError> {
        let mut lex = SentimentLexicon::new();
        for item in data_lines(reader) {
            let (line, content) = item?;
            let (term, label) = content.rsplit_once('\t').ok_or_else(|| LexiconError::Parse {
                line,
                message: "expected `term<TAB>polarity`".into(),
            })?;
            let polarity = Polarity::from_str(label.trim()).map_err(|e| LexiconError::Parse {
                line,
                message: e.to_string(),
            })?;
            lex.insert(term, polarity, config)?;
        }
        Ok(lex)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# sentiment lexicon: {} words, {} phrases",
            self.word_count(),
            self.phrase_count()
        )?;
        for e in self.entries() {
            writeln!(w, "{}\t{}", e.term, e.polarity)?;
        }
        w.flush()
    }
}

pub fn load_sentiment_lexicon(
    path: impl AsRef<Path>,
    config: &NormalizationConfig,
) -> Result<SentimentLexicon, LexiconError> {
    let path = path.as_ref();
    SentimentLexicon::from_reader(open(path)?, config)
}

pub fn save_sentiment_lexicon(
    lex: &SentimentLexicon,
    path: impl AsRef<Path>,
) -> Result<(), LexiconError> {
    let path = path.as_ref();
    lex.write_to(create(path)?)
        .map_err(|e| LexiconError::io(path, e))
}

macro_rules! word_set {
    ($(#[$doc:meta])* $name:ident, $kind:literal, $domain:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Default, PartialEq, Eq)]
        pub struct $name {
            terms: BTreeSet<String>,
        }

        impl $name {
            pub fn new() -> Self {
                Self::default()
            }

            pub fn from_terms<I, S>(terms: I, config: &NormalizationConfig) -> Result<Self, LexiconError>
            where
                I: IntoIterator<Item = S>,
                S: AsRef<str>,
            {
                let mut set = BTreeSet::new();
                for raw in terms {
                    set.insert(single_token(raw.as_ref(), $kind, config)?);
                }
                Ok($name { terms: set })
            }

            pub fn contains(&self, word: &str) -> bool {
                self.terms.contains(word)
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = &str> {
                self.terms.iter().map(String::as_str)
            }

            pub fn content_hash(&self) -> String {
                let mut fp = Fingerprint::new($domain);
                for t in &self.terms {
                    fp.field(t);
                }
                fp.finish()
            }

            pub fn from_reader<R: Read>(reader: R, config: &NormalizationConfig) -> Result<Self, LexiconError> {
                let mut set = BTreeSet::new();
                for item in data_lines(reader) {
                    let (_, content) = item?;
                    let term = content.split('\t').next().unwrap_or_default();
                    set.insert(single_token(term, $kind, config)?);
                }
                Ok($name { terms: set })
            }

            pub fn load(path: impl AsRef<Path>, config: &NormalizationConfig) -> Result<Self, LexiconError> {
                let path = path.as_ref();
                Self::from_reader(open(path)?, config)
            }

            pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
                writeln!(w, "# {} list: {} terms", $kind, self.terms.len())?;
                for t in &self.terms {
                    writeln!(w, "{t}")?;
                }
                w.flush()
            }

            pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
                let path = path.as_ref();
                self.write_to(create(path)?)
                    .map_err(|e| LexiconError::io(path, e))
            }
        }
    };
}

word_set!(
    /// Single-token negation particles such as `مش` and `مو`.
    NegationLexicon,
    "negation",
    "negation-lexicon/v1"
);

word_set!(
    /// Words excluded from objective-lexicon induction (stop-words, person
    /// names, places). Not used during feature extraction.
    FilterList,
    "filter",
    "filter-list/v1"
);

impl NegationLexicon {
    /// Fails if any negation word is also a single-word sentiment term.
    pub fn check_disjoint(&self, slex: &SentimentLexicon) -> Result<(), LexiconError> {
        match self.terms.iter().find(|t| slex.word_polarity(t).is_some()) {
            Some(t) => Err(LexiconError::NegationOverlap { term: t.clone() }),
            None => Ok(()),
        }
    }
}

/// Tendency class of an objective word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tendency {
    Positive,
    Negative,
    Neutral,
}

impl Tendency {
    /// `Positive` iff `pt >= threshold`, `Negative` iff `nt >= threshold`,
    /// otherwise `Neutral`. Exclusive for any threshold above 0.5.
    pub fn classify(pt: f64, nt: f64, threshold: f64) -> Tendency {
        if pt >= threshold {
            Tendency::Positive
        } else if nt >= threshold {
            Tendency::Negative
        } else {
            Tendency::Neutral
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tendency::Positive => "positive",
            Tendency::Negative => "negative",
            Tendency::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Tendency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tendency {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(Tendency::Positive),
            "negative" => Ok(Tendency::Negative),
            "neutral" => Ok(Tendency::Neutral),
            _ => Err(format!("unknown tendency {s:?}")),
        }
    }
}

/// What counts as one occurrence of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    /// Every token occurrence counts.
    #[default]
    Occurrences,
    /// A word counts at most once per review.
    Documents,
}

impl FromStr for Counting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "occurrences" => Ok(Counting::Occurrences),
            "documents" => Ok(Counting::Documents),
            _ => Err(format!("unknown counting mode {s:?}")),
        }
    }
}

impl fmt::Display for Counting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counting::Occurrences => "occurrences",
            Counting::Documents => "documents",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub threshold: f64,
    /// Words seen fewer times than this are kept but classed `Neutral`.
    pub min_count: u64,
    pub counting: Counting,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            threshold: 0.6,
            min_count: 1,
            counting: Counting::Occurrences,
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<(), LexiconError> {
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(LexiconError::Config(format!(
                "threshold must lie in (0.5, 1], got {}",
                self.threshold
            )));
        }
        if self.min_count == 0 {
            return Err(LexiconError::Config("min_count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Occurrence counts and tendency of one objective word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveEntry {
    pub word: String,
    pub n_total: u64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub pt: f64,
    pub nt: f64,
    pub tendency: Tendency,
}

impl ObjectiveEntry {
    /// Requires `n_pos + n_neg > 0`.
    pub fn from_counts(word: impl Into<String>, n_pos: u64, n_neg: u64, config: &ObjectiveConfig) -> Self {
        let n_total = n_pos + n_neg;
        assert!(n_total > 0, "objective entry without occurrences");
        let pt = n_pos as f64 / n_total as f64;
        let nt = n_neg as f64 / n_total as f64;
        let tendency = if n_total < config.min_count {
            Tendency::Neutral
        } else {
            Tendency::classify(pt, nt, config.threshold)
        };
        ObjectiveEntry {
            word: word.into(),
            n_total,
            n_pos,
            n_neg,
            pt,
            nt,
            tendency,
        }
    }
}

/// Where an objective lexicon came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveMeta {
    pub config: ObjectiveConfig,
    pub corpus: String,
    pub corpus_hash: String,
}

/// Token accounting from one builder run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub tokens: u64,
    pub phrase_tokens: u64,
    pub sentiment_tokens: u64,
    pub negation_tokens: u64,
    pub filtered_tokens: u64,
    /// Distinct words before removing sentiment, negation and filter words.
    pub distinct_candidates: usize,
    pub objective_words: usize,
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
}

impl fmt::Display for FilterStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tokens={} phrase={} sentiment={} negation={} filtered={} | distinct={} objective={} (positive={} negative={} neutral={})",
            self.tokens,
            self.phrase_tokens,
            self.sentiment_tokens,
            self.negation_tokens,
            self.filtered_tokens,
            self.distinct_candidates,
            self.objective_words,
            self.positive,
            self.negative,
            self.neutral
        )
    }
}

/// Objective words with their induced tendency.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveLexicon {
    entries: BTreeMap<String, ObjectiveEntry>,
    meta: ObjectiveMeta,
    stats: FilterStats,
}

impl ObjectiveLexicon {
    pub fn meta(&self) -> &ObjectiveMeta {
        &self.meta
    }

    /// Builder statistics; all zero for a lexicon read from disk except the
    /// per-class counts.
    pub fn stats(&self) -> &FilterStats {
        &self.stats
    }

    pub fn get(&self, word: &str) -> Option<&ObjectiveEntry> {
        self.entries.get(word)
    }

    pub fn tendency(&self, word: &str) -> Option<Tendency> {
        self.entries.get(word).map(|e| e.tendency)
    }

    pub fn entries(&self) -> impl Iterator<Item = &ObjectiveEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, tendency: Tendency) -> usize {
        self.entries.values().filter(|e| e.tendency == tendency).count()
    }

    pub fn content_hash(&self) -> String {
        let mut fp = Fingerprint::new("objective-lexicon/v1");
        fp.field(&self.meta.config.threshold.to_string())
            .field(&self.meta.config.min_count.to_string())
            .field(&self.meta.config.counting.to_string());
        for e in self.entries.values() {
            fp.field(&e.word)
                .field(&e.n_pos.to_string())
                .field(&e.n_neg.to_string());
        }
        fp.finish()
    }

    /// Fails if an objective word is also a sentiment term or a filter word.
    pub fn check_disjoint(
        &self,
        slex: &SentimentLexicon,
        filter: &FilterList,
    ) -> Result<(), LexiconError> {
        for w in self.entries.keys() {
            if slex.contains_term(w) {
                return Err(LexiconError::ObjectiveOverlap {
                    term: w.clone(),
                    other: "sentiment lexicon",
                });
            }
            if filter.contains(w) {
                return Err(LexiconError::ObjectiveOverlap {
                    term: w.clone(),
                    other: "filter list",
                });
            }
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let c = &self.meta.config;
        writeln!(w, "# objective-word tendency lexicon: word, n_pos, n_neg, tendency")?;
        writeln!(
            w,
            "#! threshold={}\tmin_count={}\tcounting={}\tcorpus={}\tcorpus_hash={}",
            c.threshold,
            c.min_count,
            c.counting,
            self.meta.corpus.replace(['\t', '\n'], " "),
            self.meta.corpus_hash
        )?;
        for e in self.entries.values() {
            writeln!(w, "{}\t{}\t{}\t{}", e.word, e.n_pos, e.n_neg, e.tendency)?;
        }
        w.flush()
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, LexiconError> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let mut meta = None;
        let mut entries = BTreeMap::new();
        while let Some((i, line)) = lines.next() {
            let line = line.map_err(|e| LexiconError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let lineno = i + 1;
            if let Some(header) = line.strip_prefix("#!") {
                meta = Some(parse_meta(header)?);
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let meta = meta.as_ref().ok_or_else(|| {
                LexiconError::Metadata("entries appear before the `#!` header line".into())
            })?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(LexiconError::Parse {
                    line: lineno,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let count = |s: &str| {
                s.parse::<u64>().map_err(|e| LexiconError::Parse {
                    line: lineno,
                    message: format!("bad count {s:?}: {e}"),
                })
            };
            let (n_pos, n_neg) = (count(fields[1])?, count(fields[2])?);
            if n_pos + n_neg == 0 {
                return Err(LexiconError::Parse {
                    line: lineno,
                    message: "word with zero occurrences".into(),
                });
            }
            let stored: Tendency = fields[3].parse().map_err(|m| LexiconError::Parse {
                line: lineno,
                message: m,
            })?;
            let entry = ObjectiveEntry::from_counts(fields[0], n_pos, n_neg, &meta.config);
            if entry.tendency != stored {
                return Err(LexiconError::TendencyMismatch {
                    line: lineno,
                    word: fields[0].to_string(),
                    stored,
                    computed: entry.tendency,
                });
            }
            if entries.insert(fields[0].to_string(), entry).is_some() {
                return Err(LexiconError::Conflict {
                    term: fields[0].to_string(),
                });
            }
        }
        let meta = meta.ok_or_else(|| LexiconError::Metadata("missing `#!` header line".into()))?;
        let mut lex = ObjectiveLexicon {
            entries,
            meta,
            stats: FilterStats::default(),
        };
        lex.stats.objective_words = lex.len();
        lex.stats.positive = lex.count(Tendency::Positive);
        lex.stats.negative = lex.count(Tendency::Negative);
        lex.stats.neutral = lex.count(Tendency::Neutral);
        Ok(lex)
    }
}

fn parse_meta(header: &str) -> Result<ObjectiveMeta, LexiconError> {
    let mut config = ObjectiveConfig::default();
    let (mut corpus, mut corpus_hash) = (String::new(), String::new());
    let mut seen_threshold = false;
    for field in header.trim().split('\t').filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| LexiconError::Metadata(format!("bad field {field:?}")))?;
        let bad = |e: String| LexiconError::Metadata(format!("{key}: {e}"));
        match key.trim() {
            "threshold" => {
                config.threshold = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
                seen_threshold = true;
            }
            "min_count" => {
                config.min_count = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "counting" => config.counting = value.parse().map_err(bad)?,
            "corpus" => corpus = value.to_string(),
            "corpus_hash" => corpus_hash = value.to_string(),
            other => return Err(LexiconError::Metadata(format!("unknown key {other:?}"))),
        }
    }
    if !seen_threshold {
        return Err(LexiconError::Metadata("threshold missing".into()));
    }
    config.validate()?;
    Ok(ObjectiveMeta {
        config,
        corpus,
        corpus_hash,
    })
}

pub fn load_objective_lexicon(path: impl AsRef<Path>) -> Result<ObjectiveLexicon, LexiconError> {
    let path = path.as_ref();
    ObjectiveLexicon::from_reader(open(path)?)
}

pub fn save_objective_lexicon(
    lex: &ObjectiveLexicon,
    path: impl AsRef<Path>,
) -> Result<(), LexiconError> {
    let path = path.as_ref();
    lex.write_to(create(path)?)
        .map_err(|e| LexiconError::io(path, e))
}

/// Induces the objective-word lexicon from labeled reviews.
///
/// Each review is run through the text pipeline and phrase matching; every
/// residual token that is not a sentiment word, negation word or filter word
/// is tallied against the review's label.
pub fn build_objective_lexicon(
    corpus: &Corpus,
    slex: &SentimentLexicon,
    nlex: &NegationLexicon,
    filter: &FilterList,
    config: &ObjectiveConfig,
    norm: &NormalizationConfig,
) -> Result<ObjectiveLexicon, LexiconError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(LexiconError::Build("corpus is empty".into()));
    }
    let mut tallies: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut stats = FilterStats::default();
    let mut candidates: HashSet<String> = HashSet::new();
    for review in corpus {
        let tokens = textproc::preprocess_words(&review.text, norm);
        let matched = slex.match_phrases(&tokens);
        stats.tokens += tokens.len() as u64;
        stats.phrase_tokens += (tokens.len() - matched.residual.len()) as u64;
        let mut seen = HashSet::new();
        for word in matched.residual {
            if !candidates.contains(&word) {
                candidates.insert(word.clone());
            }
            if slex.word_polarity(&word).is_some() {
                stats.sentiment_tokens += 1;
                continue;
            }
            if nlex.contains(&word) {
                stats.negation_tokens += 1;
                continue;
            }
            if filter.contains(&word) {
                stats.filtered_tokens += 1;
                continue;
            }
            if config.counting == Counting::Documents && !seen.insert(word.clone()) {
                continue;
            }
            let tally = tallies.entry(word).or_default();
            match review.label {
                Polarity::Positive => tally.0 += 1,
                Polarity::Negative => tally.1 += 1,
            }
        }
    }
    let entries: BTreeMap<String, ObjectiveEntry> = tallies
        .into_iter()
        .map(|(w, (p, n))| {
            let e = ObjectiveEntry::from_counts(w.clone(), p, n, config);
            (w, e)
        })
        .collect();
    stats.distinct_candidates = candidates.len();
    let mut lex = ObjectiveLexicon {
        entries,
        meta: ObjectiveMeta {
            config: *config,
            corpus: corpus.name().to_string(),
            corpus_hash: corpus.content_hash(),
        },
        stats,
    };
    lex.stats.objective_words = lex.len();
    lex.stats.positive = lex.count(Tendency::Positive);
    lex.stats.negative = lex.count(Tendency::Negative);
    lex.stats.neutral = lex.count(Tendency::Neutral);
    Ok(lex)
}
