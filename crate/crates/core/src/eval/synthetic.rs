//! Synthetic labeled corpora with planted lexicon signal.
//!
//! Every review is a sequence of token slots. A slot is a sentiment word
//! (agreeing with the review label with probability `sentiment_agreement`),
//! an objective tendency word, or label-independent filler. Sentiment slots
//! are sometimes realized as a compound phrase, or as a negation word
//! followed by a word of the opposite prior polarity.
//!
//! Tendency words come in two groups. Choosing between them per slot with
//! label-dependent probabilities gives each positive-group word an expected
//! share `objective_strength` of positive-review occurrences, and each
//! negative-group word the same share of negative-review occurrences.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{Corpus, Polarity, Review};
use crate::lexicon::{NegationLexicon, SentimentLexicon, Tendency};
use crate::textproc::NormalizationConfig;

/// Letters that survive the default text pipeline unchanged.
const LETTERS: &[char] = &[
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع', 'غ', 'ف', 'ق',
    'ك', 'ل', 'م', 'ن', 'ه', 'ي',
];

const NEGATIONS: &[&str] = &["ما", "لا", "مش", "ليس", "لم", "لن", "غير"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_reviews: usize,
    pub seed: u64,
    pub positive_fraction: f64,
    /// Sentiment words per polarity.
    pub sentiment_words: usize,
    /// Two-word phrases per polarity.
    pub phrases: usize,
    /// Tendency-bearing objective words per polarity.
    pub tendency_words: usize,
    pub filler_words: usize,
    pub negation_words: usize,
    /// Probability that a slot holds a sentiment word or phrase.
    pub sentiment_rate: f64,
    /// Probability that a sentiment slot matches the review label.
    pub sentiment_agreement: f64,
    /// Probability that a slot holds a tendency word.
    pub objective_rate: f64,
    /// Planted share of same-class occurrences for tendency words.
    pub objective_strength: f64,
    /// Share of sentiment slots written as negation + opposite word.
    pub negation_rate: f64,
    /// Share of sentiment slots written as a phrase.
    pub phrase_rate: f64,
    pub min_len: usize,
    pub mean_len: f64,
    pub max_len: usize,
    /// Gamma shape of `length - min_len`.
    pub length_shape: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_reviews: 2000,
            seed: 1,
            positive_fraction: 0.5,
            sentiment_words: 150,
            phrases: 20,
            tendency_words: 40,
            filler_words: 800,
            negation_words: 4,
            sentiment_rate: 0.15,
            sentiment_agreement: 0.7,
            objective_rate: 0.10,
            objective_strength: 0.8,
            negation_rate: 0.1,
            phrase_rate: 0.05,
            min_len: 2,
            mean_len: 23.0,
            max_len: 159,
            length_shape: 1.5,
        }
    }
}

/// A generated corpus with the lexicons used to plant its signal.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub corpus: Corpus,
    pub sentiment: SentimentLexicon,
    pub negation: NegationLexicon,
    /// True tendency of every objective word (filler is neutral).
    pub tendency: BTreeMap<String, Tendency>,
    /// Expected share of positive-review occurrences per tendency word.
    pub planted_pt: BTreeMap<String, f64>,
}

fn err(msg: impl Into<String>) -> EvalError {
    EvalError::Synthetic(msg.into())
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        let probs = [
            ("sentiment_rate", self.sentiment_rate),
            ("sentiment_agreement", self.sentiment_agreement),
            ("objective_rate", self.objective_rate),
            ("objective_strength", self.objective_strength),
            ("negation_rate", self.negation_rate),
            ("phrase_rate", self.phrase_rate),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(err(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !(self.positive_fraction > 0.0 && self.positive_fraction < 1.0) {
            return Err(err("positive_fraction must lie in (0, 1)"));
        }
        if self.negation_rate + self.phrase_rate > 1.0 {
            return Err(err("negation_rate + phrase_rate exceeds 1"));
        }
        if self.sentiment_rate + self.objective_rate > 1.0 {
            return Err(err("sentiment_rate + objective_rate exceeds 1"));
        }
        if self.objective_strength < 0.5 {
            return Err(err("objective_strength below 0.5 would swap the tendency groups"));
        }
        if self.n_reviews < 2 {
            return Err(err("need at least 2 reviews"));
        }
        let need = |rate: f64, n: usize, what: &str| {
            if rate > 0.0 && n == 0 {
                Err(err(format!("{what} vocabulary is empty")))
            } else {
                Ok(())
            }
        };
        need(self.sentiment_rate, self.sentiment_words, "sentiment")?;
        need(self.objective_rate, self.tendency_words, "tendency")?;
        need(1.0 - self.sentiment_rate - self.objective_rate, self.filler_words, "filler")?;
        need(self.sentiment_rate * self.negation_rate, self.negation_words, "negation")?;
        need(self.sentiment_rate * self.phrase_rate, self.phrases, "phrase")?;
        if self.negation_words > NEGATIONS.len() {
            return Err(err(format!("at most {} negation words", NEGATIONS.len())));
        }
        if !(self.min_len >= 1
            && self.min_len as f64 <= self.mean_len
            && self.mean_len <= self.max_len as f64
            && self.length_shape > 0.0)
        {
            return Err(err("length bounds must satisfy 1 <= min <= mean <= max and shape > 0"));
        }
        self.group_probabilities().map(|_| ())
    }

    /// Probability of picking the positive tendency group in a positive and
    /// in a negative review.
    fn group_probabilities(&self) -> Result<(f64, f64), EvalError> {
        let (t, pi) = (self.objective_strength, self.positive_fraction);
        if (t - 0.5).abs() < 1e-12 {
            return Ok((0.5, 0.5));
        }
        let a = t * (t * pi - (1.0 - pi) * (1.0 - t)) / (2.0 * t - 1.0);
        let b = a * (1.0 - t) / t;
        let (gp, gn) = (a / pi, b / (1.0 - pi));
        if !((0.0..=1.0).contains(&gp) && (0.0..=1.0).contains(&gn)) {
            return Err(err(format!(
                "objective_strength {t} is unreachable with positive_fraction {pi}"
            )));
        }
        Ok((gp, gn))
    }
}

struct WordMaker {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl WordMaker {
    fn word(&mut self) -> String {
        loop {
            let len = self.rng.gen_range(3..=6);
            let mut w = String::new();
            let mut prev = None;
            while w.chars().count() < len {
                let c = *LETTERS.choose(&mut self.rng).expect("letters");
                if Some(c) != prev {
                    w.push(c);
                    prev = Some(c);
                }
            }
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn words(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.word()).collect()
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData, EvalError> {
    spec.validate()?;
    let (g_pos, g_neg) = spec.group_probabilities()?;
    let mut maker = WordMaker {
        rng: ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5EED_1E71C0),
        used: NEGATIONS.iter().map(|s| s.to_string()).collect(),
    };
    let negations: Vec<String> = NEGATIONS[..spec.negation_words].iter().map(|s| s.to_string()).collect();
    let pos_words = maker.words(spec.sentiment_words);
    let neg_words = maker.words(spec.sentiment_words);
    let phrase = |m: &mut WordMaker| format!("{} {}", m.word(), m.word());
    let pos_phrases: Vec<String> = (0..spec.phrases).map(|_| phrase(&mut maker)).collect();
    let neg_phrases: Vec<String> = (0..spec.phrases).map(|_| phrase(&mut maker)).collect();
    let pos_tend = maker.words(spec.tendency_words);
    let neg_tend = maker.words(spec.tendency_words);
    let filler = maker.words(spec.filler_words);

    let norm = NormalizationConfig::default();
    let entries = pos_words
        .iter()
        .chain(&pos_phrases)
        .map(|w| (w.as_str(), Polarity::Positive))
        .chain(neg_words.iter().chain(&neg_phrases).map(|w| (w.as_str(), Polarity::Negative)));
    let sentiment = SentimentLexicon::from_entries(entries, &norm)?;
    let negation = NegationLexicon::from_terms(&negations, &norm)?;

    let mut tendency = BTreeMap::new();
    let mut planted_pt = BTreeMap::new();
    for w in &pos_tend {
        tendency.insert(w.clone(), Tendency::Positive);
        planted_pt.insert(w.clone(), spec.objective_strength);
    }
    for w in &neg_tend {
        tendency.insert(w.clone(), Tendency::Negative);
        planted_pt.insert(w.clone(), 1.0 - spec.objective_strength);
    }
    for w in &filler {
        tendency.insert(w.clone(), Tendency::Neutral);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_pos = ((spec.n_reviews as f64 * spec.positive_fraction).round() as usize).clamp(1, spec.n_reviews - 1);
    let mut labels: Vec<Polarity> = (0..spec.n_reviews)
        .map(|i| if i < n_pos { Polarity::Positive } else { Polarity::Negative })
        .collect();
    labels.shuffle(&mut rng);

    let excess = spec.mean_len - spec.min_len as f64;
    let gamma = if excess > 0.0 {
        Some(Gamma::new(spec.length_shape, excess / spec.length_shape).map_err(|e| err(e.to_string()))?)
    } else {
        None
    };

    let mut reviews = Vec::with_capacity(spec.n_reviews);
    for (i, &label) in labels.iter().enumerate() {
        let extra = gamma.as_ref().map_or(0.0, |g| g.sample(&mut rng));
        let len = (spec.min_len as f64 + extra).round().clamp(spec.min_len as f64, spec.max_len as f64) as usize;
        let mut tokens: Vec<&str> = Vec::with_capacity(len + 1);
        while tokens.len() < len {
            let room = len - tokens.len();
            let u: f64 = rng.gen();
            if u < spec.sentiment_rate {
                let intended = if rng.gen_bool(spec.sentiment_agreement) {
                    label
                } else {
                    label.flipped()
                };
                let v: f64 = rng.gen();
                let words = |p: Polarity| if p == Polarity::Positive { &pos_words } else { &neg_words };
                if v < spec.phrase_rate && room >= 2 {
                    let list = if intended == Polarity::Positive { &pos_phrases } else { &neg_phrases };
                    let p = list.choose(&mut rng).expect("phrases");
                    tokens.extend(p.split(' '));
                } else if v < spec.phrase_rate + spec.negation_rate && room >= 2 {
                    tokens.push(negations.choose(&mut rng).expect("negations"));
                    tokens.push(words(intended.flipped()).choose(&mut rng).expect("words"));
                } else {
                    tokens.push(words(intended).choose(&mut rng).expect("words"));
                }
            } else if u < spec.sentiment_rate + spec.objective_rate {
                let g = if label == Polarity::Positive { g_pos } else { g_neg };
                let group = if rng.gen_bool(g) { &pos_tend } else { &neg_tend };
                tokens.push(group.choose(&mut rng).expect("tendency words"));
            } else {
                tokens.push(filler.choose(&mut rng).expect("filler"));
            }
        }
        reviews.push(Review::new(format!("s{i:05}"), tokens.join(" "), label));
    }
    let corpus = Corpus::new(format!("synthetic-{}", spec.seed), reviews)?;
    Ok(SyntheticData {
        corpus,
        sentiment,
        negation,
        tendency,
        planted_pt,
    })
}
