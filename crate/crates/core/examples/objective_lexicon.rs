//! Induces the objective-word tendency lexicon from the sample corpus and
//! lists the strongest words of each tendency.

use std::path::Path;

use arsent::corpus::load_corpus;
use arsent::lexicon::{build_objective_lexicon, load_sentiment_lexicon};
use arsent::{FilterList, NegationLexicon, NormalizationConfig, ObjectiveConfig, Tendency};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let norm = NormalizationConfig::default();
    let corpus = load_corpus(data.join("sample_corpus.jsonl"))?;
    let slex = load_sentiment_lexicon(data.join("sentiment.tsv"), &norm)?;
    let nlex = NegationLexicon::load(data.join("negations.txt"), &norm)?;
    let filter = FilterList::load(data.join("filter.txt"), &norm)?;

    let cfg = ObjectiveConfig {
        min_count: 2,
        ..ObjectiveConfig::default()
    };
    let olex = build_objective_lexicon(&corpus, &slex, &nlex, &filter, &cfg, &norm)?;
    println!("{}", olex.stats());
    for t in [Tendency::Positive, Tendency::Negative, Tendency::Neutral] {
        println!("{t}: {} words", olex.count(t));
    }

    let mut ranked: Vec<_> = olex.entries().filter(|e| e.tendency != Tendency::Neutral).collect();
    ranked.sort_by(|a, b| b.n_total.cmp(&a.n_total).then(a.word.cmp(&b.word)));
    println!("\nword\tpos\tneg\tpt\ttendency");
    for e in ranked.iter().take(15) {
        println!("{}\t{}\t{}\t{:.2}\t{}", e.word, e.n_pos, e.n_neg, e.pt, e.tendency);
    }
    Ok(())
}
