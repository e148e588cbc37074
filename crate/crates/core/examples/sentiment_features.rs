//! Prints the eight dense sentiment features of a review, with the role of
//! each word after negation (before phrase removal).
//!
//! cargo run --example sentiment_features -- "ما حلو المكان بس الاكل ممتاز"

use std::path::Path;

use arsent::features::{apply_negation, extract_sentiment_features, TokenRole};
use arsent::lexicon::load_sentiment_lexicon;
use arsent::textproc::preprocess_words;
use arsent::{NegationLexicon, NormalizationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let norm = NormalizationConfig::default();
    let slex = load_sentiment_lexicon(data.join("sentiment.tsv"), &norm)?;
    let nlex = NegationLexicon::load(data.join("negations.txt"), &norm)?;

    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "المكان مش نظيف والاكل ما حلو بس الموظف محترم يستاهل الزيارة".into());
    let words = preprocess_words(&text, &norm);
    for tok in apply_negation(&words, &slex, &nlex) {
        let role = match tok.role {
            TokenRole::Sentiment { prior, effective } if prior != effective => format!("{prior} -> {effective}"),
            TokenRole::Sentiment { prior, .. } => prior.to_string(),
            other => format!("{other:?}").to_lowercase(),
        };
        println!("{:<12} {role}", tok.surface);
    }
    let f = extract_sentiment_features(&words, &slex, None, &nlex);
    println!("\n{f:?}");
    println!("dense row {:?}", f.to_array());
    Ok(())
}
