//! Loads the bundled sample corpus and writes a stratified 85/15 split.

use std::path::Path;

use arsent::corpus::{corpus_stats, load_corpus, split};
use arsent::SplitSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_corpus.jsonl");
    let corpus = load_corpus(&path)?;
    let (pos, neg) = corpus.label_counts();
    println!("{}: {} reviews ({pos} positive, {neg} negative)", corpus.name(), corpus.len());
    println!("content hash {}", corpus.content_hash());

    let spec = SplitSpec::default();
    let (train, test) = split(&corpus, &spec)?;
    println!("seed {} -> train {} / test {}", spec.seed, train.len(), test.len());
    println!("train labels {:?}, test labels {:?}", train.label_counts(), test.label_counts());
    println!("test ids: {}", test.iter().map(|r| r.id.as_str()).collect::<Vec<_>>().join(" "));

    let stats = corpus_stats(&corpus, &Default::default())?;
    println!("{stats}");
    Ok(())
}
