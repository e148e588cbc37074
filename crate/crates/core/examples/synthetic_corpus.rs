//! Generates a synthetic review corpus with planted sentiment and tendency
//! words, then checks how well the induced lexicon recovers the plant.
//!
//! cargo run --example synthetic_corpus -- [reviews] [seed]

use arsent::corpus::corpus_stats;
use arsent::eval::{generate_synthetic, SyntheticSpec};
use arsent::lexicon::build_objective_lexicon;
use arsent::{FilterList, NormalizationConfig, ObjectiveConfig, Tendency};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_reviews: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let spec = SyntheticSpec {
        n_reviews,
        seed,
        ..SyntheticSpec::default()
    };
    let data = generate_synthetic(&spec)?;
    let norm = NormalizationConfig::default();
    println!("{}", corpus_stats(&data.corpus, &norm)?);
    for r in data.corpus.iter().take(3) {
        println!("{} [{}] {}", r.id, r.label, r.text);
    }

    let olex = build_objective_lexicon(
        &data.corpus,
        &data.sentiment,
        &data.negation,
        &FilterList::new(),
        &ObjectiveConfig::default(),
        &norm,
    )?;
    let planted: Vec<(&String, &Tendency)> = data.tendency.iter().filter(|(_, t)| **t != Tendency::Neutral).collect();
    let recovered = planted.iter().filter(|(w, t)| olex.tendency(w) == Some(**t)).count();
    println!("\nplanted {} tendency words, {recovered} recovered with the same tendency", planted.len());
    let spurious = data
        .tendency
        .iter()
        .filter(|(w, t)| **t == Tendency::Neutral && olex.tendency(w).is_some_and(|got| got != Tendency::Neutral))
        .count();
    println!("{spurious} filler words were given a tendency");
    for (w, pt) in data.planted_pt.iter().take(5) {
        let got = olex.get(w).map(|e| e.pt).unwrap_or(f64::NAN);
        println!("{w}: planted pt {pt:.2}, observed {got:.2}");
    }
    Ok(())
}
