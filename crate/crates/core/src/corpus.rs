//! Labeled review corpora: JSON-lines storage, deterministic splitting and
//! summary statistics.
//!
//! One record per line:
//!
//! ```text
//! {"id":"r1","text":"المكان حلو","label":"positive"}
//! ```

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::Fingerprint;
use crate::textproc::{self, NormalizationConfig};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate review id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: unknown label {value:?} (expected positive or negative)")]
    Label { line: usize, value: String },
    #[error("line {line}: review {id:?} has empty text")]
    EmptyText { id: String, line: usize },
    #[error("cannot split: {0}")]
    Split(String),
    #[error("cannot compute statistics: {0}")]
    Stats(String),
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Review label. There is no neutral class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// `+1.0` for positive, `-1.0` for negative.
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown polarity label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for Polarity {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("positive") {
            Ok(Polarity::Positive)
        } else if s.eq_ignore_ascii_case("negative") {
            Ok(Polarity::Negative)
        } else {
            Err(UnknownLabel(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub text: String,
    pub label: Polarity,
}

impl Review {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Polarity) -> Self {
        Review {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    label: String,
}

#[derive(Serialize)]
struct RecordRef<'a> {
    id: &'a str,
    text: &'a str,
    label: &'a str,
}

/// An ordered collection of reviews with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    name: String,
    reviews: Vec<Review>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids and blank texts.
    pub fn new(name: impl Into<String>, reviews: Vec<Review>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(reviews.len());
        for (i, r) in reviews.iter().enumerate() {
            if r.text.trim().is_empty() {
                return Err(CorpusError::EmptyText {
                    id: r.id.clone(),
                    line: i + 1,
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    id: r.id.clone(),
                    line: i + 1,
                });
            }
        }
        Ok(Corpus {
            name: name.into(),
            reviews,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Review> {
        self.reviews.iter()
    }

    /// `(positive, negative)` review counts.
    pub fn label_counts(&self) -> (usize, usize) {
        let pos = self
            .reviews
            .iter()
            .filter(|r| r.label == Polarity::Positive)
            .count();
        (pos, self.reviews.len() - pos)
    }

    /// Fingerprint of the review contents (ids, texts, labels in order).
    /// The corpus name does not participate.
    pub fn content_hash(&self) -> String {
        let mut fp = Fingerprint::new("corpus/v1");
        for r in &self.reviews {
            fp.field(&r.id).field(&r.text).field(r.label.as_str());
        }
        fp.finish()
    }

    pub fn from_reader<R: Read>(reader: R, name: impl Into<String>) -> Result<Self, CorpusError> {
        let name = name.into();
        let mut reviews = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| CorpusError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let label = raw.label.parse().map_err(|_| CorpusError::Label {
                line: lineno,
                value: raw.label.clone(),
            })?;
            if raw.text.trim().is_empty() {
                return Err(CorpusError::EmptyText {
                    id: raw.id,
                    line: lineno,
                });
            }
            if !seen.insert(raw.id.clone()) {
                return Err(CorpusError::DuplicateId {
                    id: raw.id,
                    line: lineno,
                });
            }
            reviews.push(Review {
                id: raw.id,
                text: raw.text,
                label,
            });
        }
        if reviews.is_empty() {
            log::warn!("corpus {name:?} is empty");
        }
        Ok(Corpus { name, reviews })
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for r in &self.reviews {
            let rec = RecordRef {
                id: &r.id,
                text: &r.text,
                label: r.label.as_str(),
            };
            serde_json::to_writer(&mut writer, &rec)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Review;
    type IntoIter = std::slice::Iter<'a, Review>;

    fn into_iter(self) -> Self::IntoIter {
        self.reviews.iter()
    }
}

/// Loads a JSON-lines corpus. The corpus is named after the file stem.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    Corpus::from_reader(file, name)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    corpus
        .write_to(BufWriter::new(file))
        .map_err(|e| CorpusError::io(path, e))
}

/// How to partition a corpus into train and test sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.85,
            seed: 42,
            stratified: true,
        }
    }
}

/// Number of training reviews for `n` reviews: `fraction * n` rounded half up.
pub fn train_size(n: usize, fraction: f64) -> usize {
    let exact = fraction * n as f64;
    // Absorb representation error so exact halves (0.85 * 2730 = 2320.5) round up.
    (exact + 0.5 + 1e-9 * exact.max(1.0)).floor() as usize
}

/// Splits `corpus` into `(train, test)`, preserving the original review
/// order within each side. Identical inputs give identical partitions.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus), CorpusError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(CorpusError::Split(format!(
            "train_fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusError::Split(format!(
            "need at least 2 reviews, corpus has {n}"
        )));
    }
    let total = train_size(n, spec.train_fraction).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; n];

    if spec.stratified {
        let groups: Vec<Vec<usize>> = [Polarity::Positive, Polarity::Negative]
            .iter()
            .map(|&p| {
                (0..n)
                    .filter(|&i| corpus.reviews[i].label == p)
                    .collect::<Vec<_>>()
            })
            .collect();
        if groups.iter().any(|g| g.is_empty()) {
            return Err(CorpusError::Split(
                "stratified split needs at least one review of each label".into(),
            ));
        }
        // Largest-remainder apportionment of `total` across labels.
        let shares: Vec<f64> = groups
            .iter()
            .map(|g| g.len() as f64 * total as f64 / n as f64)
            .collect();
        let mut quotas: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = shares[a] - shares[a].floor();
            let rb = shares[b] - shares[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut remaining = total - quotas.iter().sum::<usize>();
        for &g in order.iter().cycle() {
            if remaining == 0 {
                break;
            }
            if quotas[g] < groups[g].len() {
                quotas[g] += 1;
                remaining -= 1;
            }
        }
        for (mut group, quota) in groups.into_iter().zip(quotas) {
            group.shuffle(&mut rng);
            for &i in &group[..quota] {
                in_train[i] = true;
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        for &i in &idx[..total] {
            in_train[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::with_capacity(total), Vec::with_capacity(n - total));
    for (r, flag) in corpus.reviews.iter().zip(in_train) {
        if flag {
            train.push(r.clone());
        } else {
            test.push(r.clone());
        }
    }
    Ok((
        Corpus {
            name: format!("{}.train", corpus.name),
            reviews: train,
        },
        Corpus {
            name: format!("{}.test", corpus.name),
            reviews: test,
        },
    ))
}

/// Record of a written split, stored next to the two corpus files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub source: String,
    pub source_hash: String,
    pub spec: SplitSpec,
    pub train_size: usize,
    pub test_size: usize,
    pub train_hash: String,
    pub test_hash: String,
}

/// Splits `corpus` and writes `train.jsonl`, `test.jsonl` and
/// `split.json` into `dir`.
pub fn write_split(
    corpus: &Corpus,
    spec: &SplitSpec,
    dir: impl AsRef<Path>,
) -> Result<SplitManifest, CorpusError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
    let (train, test) = split(corpus, spec)?;
    save_corpus(&train, dir.join("train.jsonl"))?;
    save_corpus(&test, dir.join("test.jsonl"))?;
    let manifest = SplitManifest {
        source: corpus.name.clone(),
        source_hash: corpus.content_hash(),
        spec: *spec,
        train_size: train.len(),
        test_size: test.len(),
        train_hash: train.content_hash(),
        test_hash: test.content_hash(),
    };
    let path = dir.join("split.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| CorpusError::io(&path, e))?;
    Ok(manifest)
}

/// Label counts and token-length summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub reviews: usize,
    pub positive: usize,
    pub negative: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub mean_tokens: f64,
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "reviews={} positive={} negative={} tokens min={} mean={:.2} max={}",
            self.reviews,
            self.positive,
            self.negative,
            self.min_tokens,
            self.mean_tokens,
            self.max_tokens
        )
    }
}

/// Token lengths are measured after the full text pipeline.
pub fn corpus_stats(
    corpus: &Corpus,
    config: &NormalizationConfig,
) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::Stats("corpus is empty".into()));
    }
    let lengths: Vec<usize> = corpus
        .iter()
        .map(|r| textproc::preprocess(&r.text, config).len())
        .collect();
    let (positive, negative) = corpus.label_counts();
    Ok(CorpusStats {
        reviews: corpus.len(),
        positive,
        negative,
        min_tokens: *lengths.iter().min().unwrap(),
        max_tokens: *lengths.iter().max().unwrap(),
        mean_tokens: lengths.iter().sum::<usize>() as f64 / lengths.len() as f64,
    })
}
