//! Flat TOML run configuration.
//!
//! Every key is optional. Values are resolved as command-line flag, then
//! config file, then built-in default.
//!
//! ```toml
//! seed = 7
//! mode = "proposed"
//! ngrams = "1,2"
//! threshold = 0.6
//! char_map = ["ى=ي"]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::TrainConfig;
use crate::corpus::SplitSpec;
use crate::features::{FeatureMode, FeatureSet, NgramConfig};
use crate::lexicon::{Counting, ObjectiveConfig};
use crate::textproc::NormalizationConfig;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "ARSENT_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("unknown config key `{key}`{}", .suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },
    #[error("invalid config: {0}")]
    Invalid(String),
}

macro_rules! settings {
    ($($(#[$doc:meta])* $key:ident: $ty:ty,)*) => {
        /// Partially specified settings, as read from a file or from flags.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct PartialConfig {
            $($(#[$doc])* pub $key: Option<$ty>,)*
        }

        impl PartialConfig {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($key)),*];

            /// Fills every unset field of `self` from `lower`.
            pub fn or(self, lower: PartialConfig) -> PartialConfig {
                PartialConfig { $($key: self.$key.or(lower.$key),)* }
            }
        }
    };
}

settings! {
    /// Seeds both the split and the SVM coordinate order.
    seed: u64,
    train_fraction: f64,
    stratified: bool,
    mode: String,
    ngrams: String,
    threshold: f64,
    min_count: u64,
    counting: String,
    c: f64,
    tolerance: f64,
    max_epochs: usize,
    standardize: bool,
    lexicon_from_full_corpus: bool,
    sentiment: PathBuf,
    negation: PathBuf,
    filter: PathBuf,
    strip_punctuation: bool,
    strip_digits: bool,
    strip_latin: bool,
    strip_emoticons: bool,
    elongation_min_run: usize,
    strip_wa: bool,
    wa_min_len: usize,
    wa_repeat: bool,
    /// Extra `from=to` character mappings, added to the defaults.
    char_map: Vec<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub split: SplitSpec,
    pub train: TrainConfig,
    pub objective: ObjectiveConfig,
    pub normalization: NormalizationConfig,
    pub features: FeatureSet,
    pub lexicon_from_full_corpus: bool,
    pub sentiment: Option<PathBuf>,
    pub negation: Option<PathBuf>,
    pub filter: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        PartialConfig::default().resolve().expect("defaults are valid")
    }
}

impl PartialConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        for key in table.keys() {
            if !Self::KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    key: key.clone(),
                    suggestion: nearest_key(key),
                });
            }
        }
        table.try_into().map_err(|e: toml::de::Error| ConfigError::Syntax {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn resolve(&self) -> Result<Settings, ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        let seed = self.seed.unwrap_or(42);
        let split = SplitSpec {
            train_fraction: self.train_fraction.unwrap_or(0.85),
            seed,
            stratified: self.stratified.unwrap_or(true),
        };
        if !(split.train_fraction > 0.0 && split.train_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "train_fraction must lie in (0, 1), got {}",
                split.train_fraction
            )));
        }
        let td = TrainConfig::default();
        let train = TrainConfig {
            c: self.c.unwrap_or(td.c),
            tolerance: self.tolerance.unwrap_or(td.tolerance),
            max_epochs: self.max_epochs.unwrap_or(td.max_epochs),
            seed,
            standardize_dense: self.standardize.unwrap_or(td.standardize_dense),
        };
        train.validate().map_err(|e| invalid(&e))?;
        let od = ObjectiveConfig::default();
        let objective = ObjectiveConfig {
            threshold: self.threshold.unwrap_or(od.threshold),
            min_count: self.min_count.unwrap_or(od.min_count),
            counting: match &self.counting {
                Some(s) => s.parse::<Counting>().map_err(|e| invalid(&e))?,
                None => od.counting,
            },
        };
        objective.validate().map_err(|e| invalid(&e))?;
        let nd = NormalizationConfig::default();
        let mut normalization = NormalizationConfig {
            strip_punctuation: self.strip_punctuation.unwrap_or(nd.strip_punctuation),
            strip_digits: self.strip_digits.unwrap_or(nd.strip_digits),
            strip_latin: self.strip_latin.unwrap_or(nd.strip_latin),
            strip_emoticons: self.strip_emoticons.unwrap_or(nd.strip_emoticons),
            elongation_min_run: self.elongation_min_run.unwrap_or(nd.elongation_min_run),
            strip_wa: self.strip_wa.unwrap_or(nd.strip_wa),
            wa_min_len: self.wa_min_len.unwrap_or(nd.wa_min_len),
            wa_repeat: self.wa_repeat.unwrap_or(nd.wa_repeat),
            ..nd
        };
        if let Some(pairs) = &self.char_map {
            normalization.apply_char_pairs(pairs).map_err(|e| invalid(&e))?;
        }
        normalization.validate().map_err(|e| invalid(&e))?;
        let mode = match &self.mode {
            Some(m) => m.parse::<FeatureMode>().map_err(|e| invalid(&e))?,
            None => FeatureMode::Proposed,
        };
        let ngrams = match self.ngrams.as_deref() {
            None | Some("") | Some("none") => None,
            Some(s) => Some(s.parse::<NgramConfig>().map_err(|e| invalid(&e))?),
        };
        Ok(Settings {
            split,
            train,
            objective,
            normalization,
            features: FeatureSet::new(mode, ngrams),
            lexicon_from_full_corpus: self.lexicon_from_full_corpus.unwrap_or(false),
            sentiment: self.sentiment.clone(),
            negation: self.negation.clone(),
            filter: self.filter.clone(),
        })
    }
}

fn nearest_key(key: &str) -> Option<String> {
    PartialConfig::KEYS
        .iter()
        .map(|k| (strsim::damerau_levenshtein(key, k), *k))
        .filter(|(d, k)| *d <= 3.max(k.len() / 3))
        .min()
        .map(|(_, k)| k.to_string())
}

pub fn load_config(path: impl AsRef<Path>) -> Result<PartialConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    PartialConfig::from_toml(&text, path)
}
