//! What each agent says about one scenario: full disclosure, a random
//! draw, and the learned selector.
//!
//!     cargo run --example compare_agents -- [random-seed]

use ridex::agents::{axis_agent, pbe_agent, random_agent_default, SelectionSubset};
use ridex::explanations::Scenario;
use ridex::harness::{generate_scenarios, ExperimentConfig};
use ridex::mlp::{synth_labels, train, TeacherRule, TrainConfig};
use ridex::pricing::TripQuote;

fn main() -> ridex::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(0);

    // A small teacher-labelled corpus is enough for a usable selector.
    let mut cfg = ExperimentConfig::grid(10, 10, 8);
    cfg.rounds = 100;
    let corpus = generate_scenarios(&cfg)?.scenarios;
    let subset = SelectionSubset::default();
    let rows = synth_labels(&corpus, &subset, &TeacherRule::default(), 0.0, 1)?;
    let (model, history) = train(&rows, &TrainConfig::default())?;
    println!(
        "selector trained on {} scenarios, test per-label accuracy {:.3}\n",
        rows.len(),
        history.test.per_label_accuracy
    );

    let s = Scenario {
        scenario_id: 42,
        quote: TripQuote {
            shared_cost_usd: 7.53,
            shared_time_min: 13.0,
            private_cost_usd: 13.83,
            private_time_min: 12.0,
            public_cost_usd: 2.50,
            public_time_min: 26.0,
            co2_saved_kg: 0.5,
        },
    };
    for out in [
        pbe_agent(&s),
        random_agent_default(&s, seed)?,
        axis_agent(&model, &subset, &s)?,
    ] {
        println!("{} ({} items)", out.agent.name(), out.size());
        for t in out.texts() {
            println!("  {t}");
        }
    }
    Ok(())
}
