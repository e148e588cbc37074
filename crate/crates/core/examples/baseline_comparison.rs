//! Compares unigram, sentiment-feature and sentiment+tendency models on
//! synthetic corpora.
//!
//! cargo run --release --example baseline_comparison -- [seeds] [objective_share]

use arsent::eval::{comparison_grid, generate_synthetic, render_table, run_grid, ExperimentSpec, Resources, SyntheticSpec};
use arsent::{FeatureMode, FeatureSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let share: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.4);
    let signal = 0.25;

    let mut gains = Vec::new();
    for seed in 0..seeds {
        let data = generate_synthetic(&SyntheticSpec {
            seed,
            sentiment_rate: signal * (1.0 - share),
            objective_rate: signal * share,
            ..Default::default()
        })?;
        let mut base = ExperimentSpec::new("base", FeatureSet::new(FeatureMode::Proposed, None));
        base.split.seed = seed;
        base.train.seed = seed;
        let resources = Resources {
            sentiment: Some(data.sentiment),
            negation: Some(data.negation),
            filter: None,
        };
        let runs = run_grid(&comparison_grid(&base), &data.corpus, &resources)?;
        let reports: Vec<_> = runs.iter().map(|r| r.report.clone()).collect();
        println!("seed {seed}\n{}", render_table(&reports));
        gains.push((reports[1].accuracy - reports[0].accuracy, reports[2].accuracy - reports[1].accuracy));
    }
    let n = gains.len() as f64;
    println!(
        "mean gain: sentiment over unigram {:+.2}, tendency over sentiment {:+.2}",
        100.0 * gains.iter().map(|g| g.0).sum::<f64>() / n,
        100.0 * gains.iter().map(|g| g.1).sum::<f64>() / n
    );
    Ok(())
}
