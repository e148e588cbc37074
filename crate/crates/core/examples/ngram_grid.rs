//! Runs the sentiment+tendency model with each n-gram configuration on a
//! synthetic corpus.
//!
//! cargo run --release --example ngram_grid -- [seed]

use arsent::eval::{generate_synthetic, ngram_grid, render_table, run_grid, ExperimentSpec, Resources, SyntheticSpec};
use arsent::{FeatureMode, FeatureSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let data = generate_synthetic(&SyntheticSpec {
        seed,
        sentiment_rate: 0.15,
        objective_rate: 0.10,
        ..SyntheticSpec::default()
    })?;
    let mut base = ExperimentSpec::new("base", FeatureSet::new(FeatureMode::Proposed, None));
    base.split.seed = seed;
    base.train.seed = seed;
    let resources = Resources {
        sentiment: Some(data.sentiment),
        negation: Some(data.negation),
        filter: None,
    };
    let runs = run_grid(&ngram_grid(&base), &data.corpus, &resources)?;
    let reports: Vec<_> = runs.iter().map(|r| r.report.clone()).collect();
    println!("{}", render_table(&reports));
    for r in &runs {
        println!("{:<32} {} columns, {} epochs", r.record.name, r.vocabulary.len() + 8, r.summary.epochs);
    }
    Ok(())
}
