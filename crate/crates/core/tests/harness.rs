mod common;

use ridex::agents::SelectionSubset;
use ridex::explanations::write_scenarios;
use ridex::harness::{generate_scenarios, ingest_trips, run_comparison, ExperimentConfig};
use ridex::mlp::{synth_labels, train, TeacherRule, TrainConfig};
use ridex::roadnet::generate_grid;

fn config(rounds: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::grid(10, 10, 8);
    cfg.rounds = rounds;
    cfg
}

#[test]
fn scenario_files_are_reproducible() {
    let bytes = |cfg: &ExperimentConfig| {
        let mut buf = Vec::new();
        write_scenarios(&generate_scenarios(cfg).unwrap().scenarios, &mut buf).unwrap();
        buf
    };
    let cfg = config(20);
    assert_eq!(bytes(&cfg), bytes(&cfg));
    let mut other = cfg.clone();
    other.seeds.requests += 1;
    assert_ne!(bytes(&cfg), bytes(&other));
}

#[test]
fn worked_scenario_row_carries_the_expected_sentences() {
    let scenarios = generate_scenarios(&config(150)).unwrap().scenarios;
    let subset = SelectionSubset::default();
    let rows = synth_labels(&scenarios, &subset, &TeacherRule::default(), 0.0, 1).unwrap();
    let (model, _) = train(&rows, &TrainConfig::default()).unwrap();

    let report = run_comparison(&[common::worked_scenario()], &model, &subset, 0).unwrap();
    let axis = report.rows[0].axis.texts();
    for want in [
        "The shared ride saved you $6.3 over a private taxi.",
        "A private taxi would have cost 83% more.",
        "The shared ride saved you 13 minutes over public transportation.",
    ] {
        assert!(axis.contains(&want), "missing {want:?} in {axis:?}");
    }
    assert!(report.rows[0]
        .pbe
        .texts()
        .contains(&"A private ride would have cost $13.83 and would have taken 12 minutes."));
}

#[test]
fn report_covers_every_scenario_once() {
    let scenarios = generate_scenarios(&config(150)).unwrap().scenarios;
    assert!(scenarios.len() >= 1000);
    let report = run_comparison(
        &scenarios,
        &ridex::mlp::init(3),
        &SelectionSubset::default(),
        5,
    )
    .unwrap();
    assert_eq!(report.rows.len(), scenarios.len());
    for (row, s) in report.rows.iter().zip(&scenarios) {
        assert_eq!(row.scenario, *s);
        assert_eq!(row.pbe.scenario_id, s.scenario_id);
        assert_eq!(row.random.scenario_id, s.scenario_id);
        assert_eq!(row.axis.scenario_id, s.scenario_id);
    }
    let sm = &report.summary;
    assert!(
        (2.3..=2.7).contains(&sm.mean_random_selected),
        "{}",
        sm.mean_random_selected
    );
    assert!((1.0..=6.0).contains(&sm.mean_axis_selected));
    assert_eq!(sm.mean_pbe_facts, 4.0);
    let rate_sum: f64 = sm.random_selection_rate.values().sum();
    assert!((rate_sum - sm.mean_random_selected).abs() < 1e-9);

    let mut a = Vec::new();
    let mut b = Vec::new();
    report.write_csv(&mut a).unwrap();
    run_comparison(
        &scenarios,
        &ridex::mlp::init(3),
        &SelectionSubset::default(),
        5,
    )
    .unwrap()
    .write_csv(&mut b)
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(
        String::from_utf8(a).unwrap().lines().count(),
        scenarios.len() + 1
    );
}

#[test]
fn ingestion_snaps_exact_and_duplicate_coordinates() {
    let g = generate_grid(4, 4, 1.0, 0.1, 2).unwrap();
    let n7 = g.nodes()[7];
    let trips = format!(
        "pickup_x_km,pickup_y_km,dropoff_x_km,dropoff_y_km\n\
         0,0,{x},{y}\n0,0,{x},{y}\n0,0,13.5,-10\n",
        x = n7.x_km,
        y = n7.y_km
    );
    let r = ingest_trips(trips.as_bytes(), &g, 2.0).unwrap();
    assert_eq!(r.requests.len(), 2);
    assert!(r.requests.iter().all(|q| q.destination == 7));
    assert_eq!(r.skipped, 1);
}
