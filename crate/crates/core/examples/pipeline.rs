//! Full pipeline into a directory: network, scenarios, labels, selector and
//! the three-agent comparison report.
//!
//!     cargo run --release --example pipeline -- [out-dir]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use ridex::agents::SelectionSubset;
use ridex::error::Error;
use ridex::explanations::write_scenarios;
use ridex::harness::{generate_scenarios, run_comparison, ExperimentConfig, NetworkSource};
use ridex::mlp::{synth_labels, train, write_labeled, TeacherRule, TrainConfig};

fn create(path: &PathBuf) -> ridex::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn main() -> ridex::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(
        || std::env::temp_dir().join("ridex-pipeline"),
        PathBuf::from,
    );
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let mut cfg = ExperimentConfig::grid(12, 12, 10);
    cfg.rounds = 120;
    if let NetworkSource::Grid { seed, .. } = &mut cfg.network {
        *seed = 5;
    }
    std::fs::write(out.join("experiment.toml"), cfg.to_toml())
        .map_err(|e| Error::io(out.join("experiment.toml"), e))?;
    cfg.network.build()?.save_dir(&out.join("network"))?;

    let set = generate_scenarios(&cfg)?;
    write_scenarios(&set.scenarios, create(&out.join("scenarios.csv"))?)?;
    let vehicles: usize = set.assignments.iter().map(|a| a.routes.len()).sum();
    println!(
        "{} scenarios, {:.2} riders per vehicle",
        set.scenarios.len(),
        set.scenarios.len() as f64 / vehicles as f64
    );

    let subset = SelectionSubset::default();
    let rows = synth_labels(
        &set.scenarios,
        &subset,
        &TeacherRule::default(),
        0.05,
        cfg.seeds.labels,
    )?;
    write_labeled(&rows, &subset, create(&out.join("labels.csv"))?)?;
    let (model, history) = train(
        &rows,
        &TrainConfig {
            seed: cfg.seeds.training,
            ..TrainConfig::default()
        },
    )?;
    model.save_path(&out.join("model.json"))?;
    println!(
        "selector: per-label test accuracy {:.3}",
        history.test.per_label_accuracy
    );

    let report = run_comparison(&set.scenarios, &model, &subset, cfg.seeds.random_agent)?;
    report.write_csv(create(&out.join("report.csv"))?)?;
    std::fs::write(out.join("summary.json"), report.summary_json())
        .map_err(|e| Error::io(out.join("summary.json"), e))?;
    let s = &report.summary;
    println!(
        "mean items shown: full disclosure {:.2}, random {:.3}, learned {:.3}",
        s.mean_pbe_facts, s.mean_random_selected, s.mean_axis_selected
    );
    println!("artifacts in {}", out.display());
    Ok(())
}
