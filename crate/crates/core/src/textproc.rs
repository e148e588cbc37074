//! Normalization and tokenization of colloquial Arabic text.
//!
//! The pipeline order is fixed:
//! canonical composition, character mapping, class stripping, elongation
//! collapse, whitespace tokenization, then the conjunction (`و`) prefix rule
//! applied per token.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// The conjunction letter WAW.
pub const WAW: char = '\u{0648}';
const TATWEEL: char = '\u{0640}';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextprocError {
    #[error("invalid normalization config: {0}")]
    InvalidConfig(String),
    #[error("bad character mapping {0:?}: expected `from=to` with one character on each side")]
    BadCharPair(String),
}

/// Settings for [`normalize`] and [`strip_wa_prefix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationConfig {
    /// Single-character substitutions applied after composition.
    pub char_map: BTreeMap<char, char>,
    pub strip_punctuation: bool,
    /// ASCII, Arabic-Indic and every other numeric character.
    pub strip_digits: bool,
    pub strip_latin: bool,
    /// Removes the literal `emoticons` list plus the emoji blocks.
    pub strip_emoticons: bool,
    pub emoticons: Vec<String>,
    /// Runs of at least this many identical Arabic letters collapse to one.
    pub elongation_min_run: usize,
    pub strip_wa: bool,
    /// A leading `و` is removed only from tokens with at least this many
    /// characters.
    pub wa_min_len: usize,
    /// Keep stripping while the rule still applies (`ووحلوه` → `حلوه`).
    pub wa_repeat: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        let char_map = [
            ('\u{0622}', '\u{0627}'), // آ → ا
            ('\u{0623}', '\u{0627}'), // أ → ا
            ('\u{0625}', '\u{0627}'), // إ → ا
            ('\u{0629}', '\u{0647}'), // ة → ه
            ('\u{0624}', '\u{0648}'), // ؤ → و
        ]
        .into_iter()
        .collect();
        NormalizationConfig {
            char_map,
            strip_punctuation: true,
            strip_digits: true,
            strip_latin: true,
            strip_emoticons: true,
            emoticons: [
                ":-)", ":-(", ":)", ":(", ":D", ":-D", ";)", ";-)", ":P", ":p", ":'(", "<3", "xD",
                "XD", ":/", ":|", "^_^",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            elongation_min_run: 3,
            strip_wa: true,
            wa_min_len: 4,
            wa_repeat: false,
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<(), TextprocError> {
        if self.elongation_min_run < 2 {
            return Err(TextprocError::InvalidConfig(format!(
                "elongation_min_run must be >= 2, got {}",
                self.elongation_min_run
            )));
        }
        if self.wa_min_len < 2 {
            return Err(TextprocError::InvalidConfig(format!(
                "wa_min_len must be >= 2, got {}",
                self.wa_min_len
            )));
        }
        for (from, to) in &self.char_map {
            if from.is_whitespace() || to.is_whitespace() {
                return Err(TextprocError::InvalidConfig(format!(
                    "char_map entry {from:?}->{to:?} involves whitespace"
                )));
            }
            // A value that is itself a key would make normalization non-idempotent.
            if from != to && self.char_map.contains_key(to) {
                return Err(TextprocError::InvalidConfig(format!(
                    "char_map target {to:?} is also a source character"
                )));
            }
        }
        if self.emoticons.iter().any(|e| e.is_empty()) {
            return Err(TextprocError::InvalidConfig(
                "emoticon list contains an empty string".into(),
            ));
        }
        Ok(())
    }

    /// Adds or overrides mappings given as `from=to` pairs.
    pub fn apply_char_pairs<S: AsRef<str>>(&mut self, pairs: &[S]) -> Result<(), TextprocError> {
        for pair in pairs {
            let (from, to) = parse_char_pair(pair.as_ref())?;
            self.char_map.insert(from, to);
        }
        self.validate()
    }
}

fn parse_char_pair(pair: &str) -> Result<(char, char), TextprocError> {
    let bad = || TextprocError::BadCharPair(pair.to_string());
    let (from, to) = pair.split_once('=').ok_or_else(bad)?;
    let single = |s: &str| {
        let mut it = s.trim().chars();
        match (it.next(), it.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    };
    Ok((single(from).ok_or_else(bad)?, single(to).ok_or_else(bad)?))
}

/// A whitespace-free word at a position in the token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub index: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, index: usize) -> Self {
        Token {
            surface: surface.into(),
            index,
        }
    }

    pub fn len_chars(&self) -> usize {
        self.surface.chars().count()
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.surface
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0600}'..='\u{06FF}'
        | '\u{0750}'..='\u{077F}'
        | '\u{08A0}'..='\u{08FF}'
        | '\u{FB50}'..='\u{FDFF}'
        | '\u{FE70}'..='\u{FEFF}')
        && c.is_alphabetic()
}

fn is_latin_letter(c: char) -> bool {
    c.is_alphabetic()
        && matches!(c,
            'A'..='Z'
            | 'a'..='z'
            | '\u{00AA}'
            | '\u{00BA}'
            | '\u{00C0}'..='\u{024F}'
            | '\u{1E00}'..='\u{1EFF}'
            | '\u{2C60}'..='\u{2C7F}'
            | '\u{A720}'..='\u{A7FF}'
            | '\u{FF21}'..='\u{FF3A}'
            | '\u{FF41}'..='\u{FF5A}')
}

fn is_emoji(c: char) -> bool {
    matches!(c,
        '\u{2600}'..='\u{27BF}'
        | '\u{2B00}'..='\u{2BFF}'
        | '\u{1F000}'..='\u{1FAFF}'
        | '\u{FE0F}'
        | '\u{200D}')
}

fn is_punctuation_or_symbol(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace() && !is_emoji(c)
}

fn dropped(c: char, config: &NormalizationConfig) -> bool {
    // Diacritics (and any other combining mark) and tatweel always go.
    if c == TATWEEL || is_combining_mark(c) {
        return true;
    }
    (config.strip_digits && c.is_numeric())
        || (config.strip_latin && is_latin_letter(c))
        || (config.strip_emoticons && is_emoji(c))
        || (config.strip_punctuation && is_punctuation_or_symbol(c))
}

fn remove_emoticon_literals(text: &mut String, emoticons: &[String]) {
    let mut ordered: Vec<&str> = emoticons.iter().map(String::as_str).collect();
    ordered.sort_by_key(|e| std::cmp::Reverse(e.len()));
    // Removal can splice a new literal together ("::))"), so repeat to a fixed point.
    loop {
        let before = text.len();
        for e in &ordered {
            if text.contains(e) {
                *text = text.replace(e, "");
            }
        }
        if text.len() == before {
            break;
        }
    }
}

fn collapse_elongation(chars: &[char], min_run: usize) -> Vec<char> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i + 1;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let run = j - i;
        if run >= min_run && is_arabic_letter(c) {
            out.push(c);
        } else {
            out.extend_from_slice(&chars[i..j]);
        }
        i = j;
    }
    out
}

/// Normalizes `text` into a single-spaced string of cleaned words.
///
/// Total function: any input yields a (possibly empty) string.
pub fn normalize(text: &str, config: &NormalizationConfig) -> String {
    let mut composed: String = text.nfc().collect();
    composed = composed
        .chars()
        .map(|c| config.char_map.get(&c).copied().unwrap_or(c))
        .collect();
    if config.strip_emoticons && !config.emoticons.is_empty() {
        remove_emoticon_literals(&mut composed, &config.emoticons);
    }
    let mut kept: String = composed.chars().filter(|&c| !dropped(c, config)).collect();
    // Dropping characters can splice a literal back together ("x!D").
    if config.strip_emoticons && !config.emoticons.is_empty() {
        remove_emoticon_literals(&mut kept, &config.emoticons);
    }
    let kept: Vec<char> = kept.chars().collect();
    let collapsed = collapse_elongation(&kept, config.elongation_min_run);
    let collapsed: String = collapsed.into_iter().collect();
    collapsed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits already-normalized text on Unicode whitespace.
pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace()
        .enumerate()
        .map(|(index, s)| Token::new(s, index))
        .collect()
}

/// Removes a leading `و` from tokens of at least `wa_min_len` characters.
pub fn strip_wa_prefix(token: Token, config: &NormalizationConfig) -> Token {
    if !config.strip_wa {
        return token;
    }
    let Token { mut surface, index } = token;
    loop {
        let len = surface.chars().count();
        if len >= config.wa_min_len && surface.starts_with(WAW) {
            surface.drain(..WAW.len_utf8());
            if config.wa_repeat {
                continue;
            }
        }
        break;
    }
    Token { surface, index }
}

/// Full text pipeline: [`normalize`], [`tokenize`], then [`strip_wa_prefix`].
pub fn preprocess(text: &str, config: &NormalizationConfig) -> Vec<Token> {
    tokenize(&normalize(text, config))
        .into_iter()
        .map(|t| strip_wa_prefix(t, config))
        .collect()
}

/// Like [`preprocess`] but returns the surfaces only.
pub fn preprocess_words(text: &str, config: &NormalizationConfig) -> Vec<String> {
    preprocess(text, config)
        .into_iter()
        .map(|t| t.surface)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> NormalizationConfig {
        NormalizationConfig::default()
    }

    #[test]
    fn elongation_and_punctuation() {
        assert_eq!(normalize("جمييييل!", &d()), "جميل");
    }

    #[test]
    fn alef_hamza_maps_to_bare_alef() {
        assert_eq!(normalize("أكل", &d()), "اكل");
        assert_eq!(normalize("إكرام آمن", &d()), "اكرام امن");
        assert_eq!(normalize("مدرسة", &d()), "مدرسه");
        assert_eq!(normalize("مؤمن", &d()), "مومن");
    }

    #[test]
    fn decomposed_hamza_composes_before_mapping() {
        // ALEF + HAMZA ABOVE composes to U+0623, which maps to bare alef.
        assert_eq!(normalize("\u{0627}\u{0654}كل", &d()), "اكل");
    }

    #[test]
    fn latin_digits_and_tanween_removed() {
        assert_eq!(normalize("nice جداً 123", &d()), "جدا");
        assert_eq!(normalize("٣ ۴ مكان", &d()), "مكان");
    }

    #[test]
    fn double_letters_survive() {
        assert_eq!(normalize("ممتاز", &d()), "ممتاز");
        assert_eq!(normalize("حلوو", &d()), "حلوو");
        assert_eq!(normalize("حلووو", &d()), "حلو");
    }

    #[test]
    fn tatweel_and_diacritics_stripped() {
        assert_eq!(normalize("جمـــيل", &d()), "جميل");
        assert_eq!(normalize("مُمْتَاز", &d()), "ممتاز");
    }

    #[test]
    fn emoticons_and_emoji() {
        assert_eq!(normalize("حلو :) 😀", &d()), "حلو");
        let mut keep = d();
        keep.strip_punctuation = false;
        assert_eq!(normalize("حلو ::))", &keep), "حلو");
    }

    #[test]
    fn latin_kept_when_configured() {
        let mut cfg = d();
        cfg.strip_latin = false;
        let toks = tokenize(&normalize("a  b", &cfg));
        assert_eq!(toks.len(), 2);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("مكان حلو"),
            vec![Token::new("مكان", 0), Token::new("حلو", 1)]
        );
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn wa_rule() {
        let cfg = d();
        assert_eq!(strip_wa_prefix(Token::new("وحلوه", 0), &cfg).surface, "حلوه");
        assert_eq!(strip_wa_prefix(Token::new("وله", 0), &cfg).surface, "وله");
        assert_eq!(strip_wa_prefix(Token::new("ووحلوه", 0), &cfg).surface, "وحلوه");
        let mut rep = d();
        rep.wa_repeat = true;
        assert_eq!(strip_wa_prefix(Token::new("ووحلوه", 0), &rep).surface, "حلوه");
        assert_eq!(strip_wa_prefix(Token::new("ووو", 3), &rep).surface, "ووو");
    }

    #[test]
    fn char_pairs_parse_and_validate() {
        let mut cfg = d();
        cfg.apply_char_pairs(&["ى=ي"]).unwrap();
        assert_eq!(normalize("على", &cfg), "علي");
        assert!(matches!(
            cfg.apply_char_pairs(&["ab=c"]),
            Err(TextprocError::BadCharPair(_))
        ));
        let mut cyc = d();
        assert!(cyc.apply_char_pairs(&["ا=ب"]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = d();
        cfg.elongation_min_run = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = d();
        cfg.wa_min_len = 1;
        assert!(cfg.validate().is_err());
        assert!(d().validate().is_ok());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = d();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: NormalizationConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
