//! Trains the explanation selector on teacher-labelled scenarios and
//! reports per-explanation test accuracy.
//!
//!     cargo run --release --example train_axis -- [scenarios] [label-noise]

use ridex::agents::SelectionSubset;
use ridex::harness::{generate_scenarios, ExperimentConfig};
use ridex::mlp::{synth_labels, train, TeacherRule, TrainConfig};

fn main() -> ridex::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(5000);
    let noise: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.0);

    let mut cfg = ExperimentConfig::grid(10, 10, 8);
    cfg.rounds = count.div_ceil(8);
    let mut scenarios = generate_scenarios(&cfg)?.scenarios;
    scenarios.truncate(count);

    let subset = SelectionSubset::default();
    let rule = TeacherRule::default();
    let rows = synth_labels(&scenarios, &subset, &rule, noise, 7)?;
    let (model, h) = train(&rows, &TrainConfig::default())?;

    println!(
        "{} rows split {}/{}/{}; best epoch {} of {}{}",
        rows.len(),
        h.split.train.len(),
        h.split.validation.len(),
        h.split.test.len(),
        h.best_epoch,
        h.epochs.len(),
        if h.stopped_early { " (early stop)" } else { "" }
    );
    for stats in h.epochs.iter().step_by((h.epochs.len() / 10).max(1)) {
        println!(
            "  epoch {:>4}: train {:.4}  validation {:.4}",
            stats.epoch, stats.train_loss, stats.validation_loss
        );
    }
    println!("test accuracy per explanation:");
    for (j, (d, acc)) in subset.descriptors().zip(&h.test.label_accuracy).enumerate() {
        let positives = rows.iter().filter(|r| r.labels[j] == 1).count();
        println!(
            "  {:>2} {:<22} {:.3}  (selected in {:.0}% of rows)",
            d.index(),
            d.label(),
            acc,
            100.0 * positives as f64 / rows.len() as f64
        );
    }
    println!(
        "overall: per-label {:.3}, exact match {:.3}",
        h.test.per_label_accuracy, h.test.exact_match_accuracy
    );
    println!(
        "model has {} layers: {:?}",
        model.layer_sizes.len() - 1,
        model.layer_sizes
    );
    Ok(())
}
