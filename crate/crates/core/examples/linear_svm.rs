//! Trains the linear SVM on a small 2-D problem and prints the convergence
//! trace and the decision values.

use arsent::classifier::{primal_objective, train_with_summary};
use arsent::features::SparseRow;
use arsent::{Polarity, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let label = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
        let centre = label.sign() * 1.2;
        let x = [centre + rng.gen_range(-1.5..1.5), centre + rng.gen_range(-1.5..1.5)];
        rows.push(SparseRow::from_dense(&x));
        labels.push(label);
    }

    for c in [0.01, 1.0, 100.0] {
        let cfg = TrainConfig { c, ..TrainConfig::default() };
        let (model, summary) = train_with_summary(&rows, &labels, None, &cfg)?;
        let correct = rows
            .iter()
            .zip(&labels)
            .filter(|(r, l)| model.predict(r).map(|p| p == **l).unwrap_or(false))
            .count();
        println!(
            "C={c:<6} w={:?} b={:.4} epochs={} converged={} gap={:.1e} primal={:.4} train acc={:.1}%",
            model.weights.iter().map(|w| (w * 1e4).round() / 1e4).collect::<Vec<_>>(),
            model.bias,
            summary.epochs,
            summary.converged,
            summary.relative_gap(),
            primal_objective(&model.weights, model.bias, &rows, &labels, c),
            100.0 * correct as f64 / rows.len() as f64
        );
    }

    let (model, summary) = train_with_summary(&rows, &labels, None, &TrainConfig::default())?;
    println!("\nprimal objective per epoch: {:?}", summary.primal_history);
    for p in [[2.0, 2.0], [0.0, 0.0], [-1.0, 0.5]] {
        let d = model.decision_value(&SparseRow::from_dense(&p))?;
        println!("f({p:?}) = {d:+.4}");
    }
    Ok(())
}
