//! Binary linear soft-margin SVM.
//!
//! Training minimizes
//!
//! ```text
//! P(w, b) = ½‖w‖² + ½b² + C Σᵢ max(0, 1 − yᵢ(w·xᵢ + b))
//! ```
//!
//! by dual coordinate descent over `αᵢ ∈ [0, C]`, with the bias handled as an
//! extra constant feature of value 1. Labels are encoded positive → `+1`,
//! negative → `−1`. The model returned is the best primal iterate seen, so
//! the recorded objective history never increases.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Polarity;
use crate::digest::Fingerprint;
use crate::features::{FeatureSet, SparseRow, DENSE_LEN};
use crate::textproc::NormalizationConfig;

const FORMAT_TAG: &str = "arsent-linear-model";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bad training data: {0}")]
    Data(String),
    #[error("cannot train: {0}")]
    Training(String),
    #[error("feature row has {found} columns, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vocabulary mismatch: model was trained with {model}, features use {provided}")]
    VocabMismatch { model: String, provided: String },
    #[error("unsupported model format: {0}")]
    Version(String),
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model file is truncated: {0}")]
    Truncated(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Hinge-loss weight `C`.
    pub c: f64,
    /// Stop once the relative duality gap falls below this.
    pub tolerance: f64,
    pub max_epochs: usize,
    /// Seeds the per-epoch coordinate order.
    pub seed: u64,
    /// Standardize the dense lexicon block using training statistics.
    pub standardize_dense: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            tolerance: 1e-4,
            max_epochs: 1000,
            seed: 42,
            standardize_dense: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ModelError::Config(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.tolerance > 0.0) {
            return Err(ModelError::Config(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_epochs == 0 {
            return Err(ModelError::Config("max_epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-column standardization of the dense lexicon block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseScaler {
    /// First column of the dense block.
    pub offset: usize,
    pub mean: [f64; DENSE_LEN],
    /// Standard deviation, or 1 for constant columns.
    pub scale: [f64; DENSE_LEN],
}

impl DenseScaler {
    pub fn fit(rows: &[SparseRow], offset: usize) -> Self {
        let n = rows.len().max(1) as f64;
        let mut sum = [0.0; DENSE_LEN];
        let mut sum_sq = [0.0; DENSE_LEN];
        for row in rows {
            for &(i, v) in &row.entries {
                if (offset..offset + DENSE_LEN).contains(&i) {
                    sum[i - offset] += v;
                }
            }
        }
        let mean = sum.map(|s| s / n);
        for row in rows {
            let mut vals = [0.0; DENSE_LEN];
            for &(i, v) in &row.entries {
                if (offset..offset + DENSE_LEN).contains(&i) {
                    vals[i - offset] = v;
                }
            }
            for k in 0..DENSE_LEN {
                sum_sq[k] += (vals[k] - mean[k]).powi(2);
            }
        }
        let scale = sum_sq.map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        });
        DenseScaler {
            offset,
            mean,
            scale,
        }
    }

    /// Returns `row` with its dense block standardized; all eight dense
    /// columns are materialized.
    pub fn transform(&self, row: &SparseRow) -> SparseRow {
        let end = self.offset + DENSE_LEN;
        let mut dense = [0.0; DENSE_LEN];
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(row.entries.len() + DENSE_LEN);
        for &(i, v) in &row.entries {
            if (self.offset..end).contains(&i) {
                dense[i - self.offset] = v;
            } else {
                entries.push((i, v));
            }
        }
        for k in 0..DENSE_LEN {
            let z = (dense[k] - self.mean[k]) / self.scale[k];
            if z != 0.0 {
                entries.push((self.offset + k, z));
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        SparseRow {
            dim: row.dim,
            entries,
        }
    }
}

/// Provenance recorded with a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelMeta {
    pub vocab_hash: String,
    pub train_hash: String,
    pub config: TrainConfig,
    pub features: Option<FeatureSet>,
    pub normalization: Option<NormalizationConfig>,
}

/// Optimizer trace of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub epochs: usize,
    pub converged: bool,
    /// Best primal objective after each epoch (non-increasing).
    pub primal_history: Vec<f64>,
    pub dual: f64,
    pub primal: f64,
}

impl TrainSummary {
    pub fn relative_gap(&self) -> f64 {
        (self.primal - self.dual) / self.primal.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Option<DenseScaler>,
    pub meta: ModelMeta,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `w·x + b`, standardizing the dense block first when the model has a
    /// scaler.
    pub fn decision_value(&self, row: &SparseRow) -> Result<f64, ModelError> {
        if row.dim != self.weights.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.weights.len(),
                found: row.dim,
            });
        }
        let raw = match &self.scaler {
            Some(s) => s.transform(row).dot(&self.weights),
            None => row.dot(&self.weights),
        };
        Ok(raw + self.bias)
    }

    /// Positive iff the decision value is `>= 0`.
    pub fn predict(&self, row: &SparseRow) -> Result<Polarity, ModelError> {
        Ok(if self.decision_value(row)? >= 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        })
    }

    pub fn check_vocab(&self, vocab_hash: &str) -> Result<(), ModelError> {
        if self.meta.vocab_hash != vocab_hash {
            return Err(ModelError::VocabMismatch {
                model: self.meta.vocab_hash.clone(),
                provided: vocab_hash.to_string(),
            });
        }
        Ok(())
    }

    pub fn content_hash(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        crate::digest::sha256_hex(&buf)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let json = |v: &dyn erased::Json| v.to_json();
        writeln!(w, "{FORMAT_TAG}\t{FORMAT_VERSION}")?;
        writeln!(w, "vocab_hash\t{}", self.meta.vocab_hash)?;
        writeln!(w, "train_hash\t{}", self.meta.train_hash)?;
        writeln!(w, "config\t{}", json(&self.meta.config))?;
        writeln!(w, "features\t{}", json(&self.meta.features))?;
        writeln!(w, "normalization\t{}", json(&self.meta.normalization))?;
        writeln!(w, "dim\t{}", self.weights.len())?;
        match &self.scaler {
            None => writeln!(w, "scaler\tnone")?,
            Some(s) => {
                write!(w, "scaler\t{}", s.offset)?;
                for v in s.mean.iter().chain(s.scale.iter()) {
                    write!(w, "\t{v:e}")?;
                }
                writeln!(w)?;
            }
        }
        writeln!(w, "bias\t{:e}", self.bias)?;
        let nnz = self.weights.iter().filter(|v| **v != 0.0).count();
        writeln!(w, "weights\t{nnz}")?;
        for (i, v) in self.weights.iter().enumerate() {
            if *v != 0.0 {
                writeln!(w, "{}:{v:e}", i + 1)?;
            }
        }
        writeln!(w, "end")?;
        w.flush()
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, ModelError> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String), ModelError> {
            match lines.next() {
                None => Err(ModelError::Truncated(format!("missing {what}"))),
                Some((i, Err(e))) => Err(ModelError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                }),
                Some((i, Ok(l))) => Ok((i + 1, l)),
            }
        };
        let (_, first) = next("header")?;
        match first.split_once('\t') {
            Some((FORMAT_TAG, v)) if v == FORMAT_VERSION.to_string() => {}
            Some((FORMAT_TAG, v)) => return Err(ModelError::Version(format!("version {v}"))),
            _ => return Err(ModelError::Version(format!("not a model file: {first:?}"))),
        }
        let mut field = |key: &str| -> Result<(usize, String), ModelError> {
            let (line, l) = next(key)?;
            match l.split_once('\t') {
                Some((k, v)) if k == key => Ok((line, v.to_string())),
                _ => Err(ModelError::Parse {
                    line,
                    message: format!("expected `{key}` field"),
                }),
            }
        };
        fn parse_json<T: serde::de::DeserializeOwned>(line: usize, s: &str) -> Result<T, ModelError> {
            serde_json::from_str(s).map_err(|e| ModelError::Parse {
                line,
                message: e.to_string(),
            })
        }
        fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ModelError>
        where
            T::Err: fmt::Display,
        {
            s.trim().parse().map_err(|e: T::Err| ModelError::Parse {
                line,
                message: format!("{s:?}: {e}"),
            })
        }
        let (_, vocab_hash) = field("vocab_hash")?;
        let (_, train_hash) = field("train_hash")?;
        let (l, v) = field("config")?;
        let config: TrainConfig = parse_json(l, &v)?;
        let (l, v) = field("features")?;
        let features: Option<FeatureSet> = parse_json(l, &v)?;
        let (l, v) = field("normalization")?;
        let normalization: Option<NormalizationConfig> = parse_json(l, &v)?;
        let (l, v) = field("dim")?;
        let dim: usize = parse_num(l, &v)?;
        let (l, v) = field("scaler")?;
        let scaler = if v == "none" {
            None
        } else {
            let parts: Vec<&str> = v.split('\t').collect();
            if parts.len() != 1 + 2 * DENSE_LEN {
                return Err(ModelError::Parse {
                    line: l,
                    message: "scaler needs an offset and 16 values".into(),
                });
            }
            let mut mean = [0.0; DENSE_LEN];
            let mut scale = [0.0; DENSE_LEN];
            for k in 0..DENSE_LEN {
                mean[k] = parse_num(l, parts[1 + k])?;
                scale[k] = parse_num(l, parts[1 + DENSE_LEN + k])?;
            }
            let offset = parse_num(l, parts[0])?;
            if offset + DENSE_LEN > dim {
                return Err(ModelError::Parse {
                    line: l,
                    message: "scaler block exceeds model dimension".into(),
                });
            }
            Some(DenseScaler {
                offset,
                mean,
                scale,
            })
        };
        let (l, v) = field("bias")?;
        let bias: f64 = parse_num(l, &v)?;
        let (l, v) = field("weights")?;
        let nnz: usize = parse_num(l, &v)?;
        let mut weights = vec![0.0; dim];
        for _ in 0..nnz {
            let (line, entry) = next("weight entry")?;
            let (i, val) = entry.split_once(':').ok_or_else(|| ModelError::Parse {
                line,
                message: format!("expected index:value, got {entry:?}"),
            })?;
            let i: usize = parse_num(line, i)?;
            if i == 0 || i > dim {
                return Err(ModelError::Parse {
                    line,
                    message: format!("index {i} outside 1..={dim}"),
                });
            }
            weights[i - 1] = parse_num(line, val)?;
        }
        let (line, end) = next("end marker")?;
        if end != "end" {
            return Err(ModelError::Parse {
                line,
                message: "expected `end`".into(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w: &f64| !w.is_finite()) {
            return Err(ModelError::Data("model contains non-finite weights".into()));
        }
        Ok(LinearModel {
            weights,
            bias,
            scaler,
            meta: ModelMeta {
                vocab_hash,
                train_hash,
                config,
                features,
                normalization,
            },
        })
    }
}

mod erased {
    pub trait Json {
        fn to_json(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn to_json(&self) -> String {
            serde_json::to_string(self).expect("model metadata serializes")
        }
    }
}

pub fn save_model(model: &LinearModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let io = |e| ModelError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let f = File::create(path).map_err(io)?;
    model.write_to(BufWriter::new(f)).map_err(io)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LinearModel, ModelError> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| ModelError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    LinearModel::from_reader(f)
}

/// Loads a model and checks it against the vocabulary the caller will use.
pub fn load_model_for_vocab(path: impl AsRef<Path>, vocab_hash: &str) -> Result<LinearModel, ModelError> {
    let model = load_model(path)?;
    model.check_vocab(vocab_hash)?;
    Ok(model)
}

/// `½‖w‖² + ½b² + C Σ hinge`, the quantity training minimizes.
pub fn primal_objective(weights: &[f64], bias: f64, rows: &[SparseRow], labels: &[Polarity], c: f64) -> f64 {
    let reg = 0.5 * (weights.iter().map(|w| w * w).sum::<f64>() + bias * bias);
    let loss: f64 = rows
        .iter()
        .zip(labels)
        .map(|(x, y)| (1.0 - y.sign() * (x.dot(weights) + bias)).max(0.0))
        .sum();
    reg + c * loss
}

fn training_hash(rows: &[SparseRow], labels: &[Polarity]) -> String {
    let mut fp = Fingerprint::new("training-set/v1");
    for (row, y) in rows.iter().zip(labels) {
        fp.field(y.as_str());
        let mut s = String::with_capacity(row.entries.len() * 12);
        for (i, v) in &row.entries {
            s.push_str(&format!("{i}:{v:e} "));
        }
        fp.field(&s);
    }
    fp.finish()
}

fn validate_input(rows: &[SparseRow], labels: &[Polarity]) -> Result<usize, ModelError> {
    if rows.len() != labels.len() {
        return Err(ModelError::Shape(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if rows.len() < 2 {
        return Err(ModelError::Training(format!(
            "need at least 2 examples, got {}",
            rows.len()
        )));
    }
    if !labels.contains(&Polarity::Positive) || !labels.contains(&Polarity::Negative) {
        return Err(ModelError::Training("both classes must be present".into()));
    }
    let dim = rows[0].dim;
    for (k, row) in rows.iter().enumerate() {
        if row.dim != dim {
            return Err(ModelError::Shape(format!(
                "row {k} has {} columns, row 0 has {dim}",
                row.dim
            )));
        }
        for &(i, v) in &row.entries {
            if i >= dim {
                return Err(ModelError::Shape(format!("row {k} has column {i} >= {dim}")));
            }
            if !v.is_finite() {
                return Err(ModelError::Data(format!("row {k} column {i} is {v}")));
            }
        }
    }
    Ok(dim)
}

/// Trains a model. `dense_offset` marks the first column of the dense
/// lexicon block, if the rows carry one.
pub fn train(
    rows: &[SparseRow],
    labels: &[Polarity],
    dense_offset: Option<usize>,
    config: &TrainConfig,
) -> Result<LinearModel, ModelError> {
    train_with_summary(rows, labels, dense_offset, config).map(|(m, _)| m)
}

pub fn train_with_summary(
    rows: &[SparseRow],
    labels: &[Polarity],
    dense_offset: Option<usize>,
    config: &TrainConfig,
) -> Result<(LinearModel, TrainSummary), ModelError> {
    config.validate()?;
    let dim = validate_input(rows, labels)?;
    let scaler = match dense_offset {
        Some(off) if config.standardize_dense => {
            if off + DENSE_LEN > dim {
                return Err(ModelError::Shape(format!(
                    "dense block at {off} exceeds {dim} columns"
                )));
            }
            Some(DenseScaler::fit(rows, off))
        }
        _ => None,
    };
    let scaled: Vec<SparseRow>;
    let xs: &[SparseRow] = match &scaler {
        Some(s) => {
            scaled = rows.iter().map(|r| s.transform(r)).collect();
            &scaled
        }
        None => rows,
    };
    let ys: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let (weights, bias, summary) = dual_coordinate_descent(xs, &ys, dim, config);
    let model = LinearModel {
        weights,
        bias,
        scaler,
        meta: ModelMeta {
            train_hash: training_hash(rows, labels),
            config: config.clone(),
            ..Default::default()
        },
    };
    Ok((model, summary))
}

fn dual_coordinate_descent(
    xs: &[SparseRow],
    ys: &[f64],
    dim: usize,
    config: &TrainConfig,
) -> (Vec<f64>, f64, TrainSummary) {
    let n = xs.len();
    let c = config.c;
    let q_diag: Vec<f64> = xs.iter().map(|x| x.norm_sq() + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let objective = |w: &[f64], b: f64| -> f64 {
        let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
        let loss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (1.0 - y * (x.dot(w) + b)).max(0.0))
            .sum();
        reg + c * loss
    };

    let mut best = (w.clone(), b, objective(&w, b));
    let mut history = Vec::new();
    let mut dual = 0.0;
    let mut converged = false;
    let mut epochs = 0;

    while epochs < config.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = (&xs[i], ys[i]);
            let g = y * (x.dot(&w) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() <= 1e-14 {
                continue;
            }
            let old = alpha[i];
            alpha[i] = (old - g / q_diag[i]).clamp(0.0, c);
            let step = (alpha[i] - old) * y;
            if step != 0.0 {
                for &(j, v) in &x.entries {
                    w[j] += step * v;
                }
                b += step;
            }
        }
        let norm_sq = w.iter().map(|v| v * v).sum::<f64>() + b * b;
        dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        let primal = objective(&w, b);
        if primal < best.2 {
            best = (w.clone(), b, primal);
        }
        history.push(best.2);
        if best.2 - dual <= config.tolerance * best.2.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!(
            "SVM stopped after {epochs} epochs with relative gap {:.3e}",
            (best.2 - dual) / best.2.abs().max(f64::MIN_POSITIVE)
        );
    }
    let (w, b, primal) = best;
    (
        w,
        b,
        TrainSummary {
            epochs,
            converged,
            primal_history: history,
            dual,
            primal,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[&[f64]]) -> Vec<SparseRow> {
        points.iter().map(|p| SparseRow::from_dense(p)).collect()
    }

    use Polarity::{Negative as N, Positive as P};

    #[test]
    fn separable_1d() {
        let x = rows(&[&[-1.0], &[1.0]]);
        let y = [N, P];
        let m = train(&x, &y, None, &TrainConfig::default()).unwrap();
        for (xi, yi) in x.iter().zip(y) {
            let d = m.decision_value(xi).unwrap();
            assert!(yi.sign() * d >= 1.0 - 1e-9, "{d}");
            assert_eq!(m.predict(xi).unwrap(), yi);
        }
    }

    #[test]
    fn xor_is_not_separable() {
        let x = rows(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let y = [P, P, N, N];
        let m = train(&x, &y, None, &TrainConfig::default()).unwrap();
        let correct = x
            .iter()
            .zip(y)
            .filter(|(xi, yi)| m.predict(xi).unwrap() == *yi)
            .count();
        assert!(correct <= 3);
    }

    #[test]
    fn tie_goes_positive() {
        let m = LinearModel {
            weights: vec![0.0],
            bias: 0.0,
            scaler: None,
            meta: ModelMeta::default(),
        };
        let x = SparseRow::from_dense(&[3.0]);
        assert_eq!(m.decision_value(&x).unwrap(), 0.0);
        assert_eq!(m.predict(&x).unwrap(), P);
    }

    #[test]
    fn decision_arithmetic() {
        let m = LinearModel {
            weights: vec![2.0],
            bias: -1.0,
            scaler: None,
            meta: ModelMeta::default(),
        };
        assert_eq!(m.decision_value(&SparseRow::from_dense(&[1.0])).unwrap(), 1.0);
        assert!(matches!(
            m.decision_value(&SparseRow::from_dense(&[1.0, 2.0])),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn input_errors() {
        let cfg = TrainConfig::default();
        let x = rows(&[&[1.0], &[2.0]]);
        assert!(matches!(train(&x, &[P, P], None, &cfg), Err(ModelError::Training(_))));
        assert!(matches!(train(&x, &[P], None, &cfg), Err(ModelError::Shape(_))));
        let ragged = vec![SparseRow::from_dense(&[1.0]), SparseRow::from_dense(&[1.0, 1.0])];
        assert!(matches!(train(&ragged, &[P, N], None, &cfg), Err(ModelError::Shape(_))));
        let nan = rows(&[&[f64::NAN], &[1.0]]);
        assert!(matches!(train(&nan, &[P, N], None, &cfg), Err(ModelError::Data(_))));
        let bad = TrainConfig {
            c: 0.0,
            ..Default::default()
        };
        assert!(matches!(train(&x, &[P, N], None, &bad), Err(ModelError::Config(_))));
    }

    #[test]
    fn history_is_non_increasing() {
        let x = rows(&[&[1.0, 0.5], &[0.2, 1.0], &[-1.0, 0.3], &[0.1, -1.2], &[0.9, 0.9], &[-0.5, -0.4]]);
        let y = [P, N, N, P, P, N];
        let (_, s) = train_with_summary(&x, &y, None, &TrainConfig::default()).unwrap();
        assert!(s.primal_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(s.converged);
        assert!(s.relative_gap() <= 1e-4);
    }

    #[test]
    fn scaler_standardizes_dense_block() {
        let x = rows(&[&[1.0, 10.0], &[1.0, 20.0], &[3.0, 30.0]]);
        let s = DenseScaler {
            offset: 0,
            mean: [0.0; DENSE_LEN],
            scale: [1.0; DENSE_LEN],
        };
        assert_eq!(s.transform(&SparseRow::from_dense(&[0.0; 8])).entries, vec![]);
        let mut padded: Vec<SparseRow> = x
            .iter()
            .map(|r| {
                let mut d = r.to_dense();
                d.resize(8, 0.0);
                SparseRow::from_dense(&d)
            })
            .collect();
        let fitted = DenseScaler::fit(&padded, 0);
        assert!((fitted.mean[1] - 20.0).abs() < 1e-12);
        assert_eq!(fitted.scale[2], 1.0);
        padded = padded.iter().map(|r| fitted.transform(r)).collect();
        let col1: Vec<f64> = padded.iter().map(|r| r.to_dense()[1]).collect();
        assert!(col1.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn model_file_round_trip_and_truncation() {
        let x = rows(&[&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0], &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0, 1.0]]);
        let (mut m, _) = train_with_summary(&x, &[P, N], Some(1), &TrainConfig::default()).unwrap();
        m.meta.vocab_hash = "abc".into();
        m.meta.normalization = Some(NormalizationConfig::default());
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let back = LinearModel::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        for r in &x {
            assert_eq!(back.decision_value(r).unwrap(), m.decision_value(r).unwrap());
        }
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 5];
        assert!(LinearModel::from_reader(cut.as_bytes()).is_err());
        let v2 = text.replacen("arsent-linear-model\t1", "arsent-linear-model\t2", 1);
        assert!(matches!(
            LinearModel::from_reader(v2.as_bytes()),
            Err(ModelError::Version(_))
        ));
        assert!(matches!(back.check_vocab("zzz"), Err(ModelError::VocabMismatch { .. })));
    }
}
