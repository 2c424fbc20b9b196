use std::path::Path;
use std::process::{Command, Output};

fn ridex(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridex"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ridex(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn graph_apsp_assign_quote() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(
        d,
        &[
            "gen-graph",
            "--rows",
            "5",
            "--cols",
            "6",
            "--spacing",
            "0.5",
            "--jitter",
            "0.2",
            "--seed",
            "4",
            "--out",
            "net",
        ],
    );
    assert!(d.join("net/nodes.csv").exists() && d.join("net/edges.csv").exists());
    ok(
        d,
        &[
            "apsp",
            "--net",
            "net",
            "--speed-kmh",
            "30",
            "--out",
            "apsp.json",
        ],
    );
    std::fs::write(
        d.join("req.csv"),
        "passenger_id,destination_node\n1,29\n2,14\n3,14\n4,5\n5,22\n",
    )
    .unwrap();
    let a: serde_json::Value = serde_json::from_str(&ok(
        d,
        &[
            "assign",
            "--net",
            "net",
            "--apsp",
            "apsp.json",
            "--origin",
            "0",
            "--requests",
            "req.csv",
            "--capacity",
            "4",
        ],
    ))
    .unwrap();
    let placed: usize = a["routes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["block"].as_array().unwrap().len())
        .sum();
    assert_eq!(placed, 5);
    assert_eq!(a["stats"]["partitions_visited"], 51);

    let q: serde_json::Value = serde_json::from_str(&ok(
        d,
        &[
            "quote",
            "--net",
            "net",
            "--apsp",
            "apsp.json",
            "--origin",
            "0",
            "--dest",
            "29",
        ],
    ))
    .unwrap();
    assert_eq!(q["shared_cost_usd"], q["private"]["cost_usd"]);
    assert!(q["public"]["num_buses"].as_u64().unwrap() >= 1);
}

#[test]
fn explain_emits_json_lines() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(
        d,
        &[
            "gen-scenarios",
            "--passengers",
            "4",
            "--rounds",
            "3",
            "--seed",
            "2",
            "--out",
            "s.csv",
        ],
    );
    let out = ok(
        d,
        &[
            "explain",
            "--agent",
            "random",
            "--scenario",
            "s.csv",
            "--seed",
            "1",
        ],
    );
    let lines: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|v| v["agent"] == "random"));
    let pbe = ok(d, &["explain", "--agent", "pbe", "--scenario", "s.csv"]);
    assert_eq!(pbe.lines().count(), 12);
}

#[test]
fn ingest_trips_warns_about_far_rows() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(
        d,
        &["gen-graph", "--rows", "3", "--cols", "3", "--out", "net"],
    );
    std::fs::write(
        d.join("trips.csv"),
        "pickup_x_km,pickup_y_km,dropoff_x_km,dropoff_y_km\n0,0,0.5,0.5\n0,0,40,40\n",
    )
    .unwrap();
    let out = ridex(d, &["ingest-trips", "--net", "net", "--trips", "trips.csv"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1"));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "passenger_id,destination_node\n0,4\n"
    );
}

#[test]
fn game_commands() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    std::fs::write(d.join("prior.csv"), "value,prob\n1,0.25\n2,0.25\n3,0.5\n").unwrap();
    let pbe: serde_json::Value =
        serde_json::from_str(&ok(d, &["game", "pbe", "--prior", "prior.csv"])).unwrap();
    assert_eq!(pbe["is_equilibrium"], true);
    let u: serde_json::Value =
        serde_json::from_str(&ok(d, &["game", "unravel", "--prior", "prior.csv"])).unwrap();
    assert_eq!(u["sequence"], serde_json::json!([2.25, 1.5, 1.0]));
    let s: serde_json::Value = serde_json::from_str(&ok(
        d,
        &[
            "game",
            "simulate",
            "--prior",
            "prior.csv",
            "--reveal-above",
            "2",
        ],
    ))
    .unwrap();
    assert_eq!(s["receiver"]["on_quiet"], 1.5);
}

#[test]
fn errors_map_to_categorized_exit_codes() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(
        d,
        &[
            "gen-scenarios",
            "--passengers",
            "2",
            "--rounds",
            "1",
            "--out",
            "s.csv",
        ],
    );

    let out = ridex(d, &["explain", "--agent", "axis", "--scenario", "s.csv"]);
    assert_eq!(out.status.code(), Some(7));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[config]"));

    std::fs::write(d.join("bad.csv"), "value,prob\n1,0.5\nx,0.5\n").unwrap();
    let out = ridex(d, &["game", "pbe", "--prior", "bad.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = ridex(d, &["game", "pbe", "--prior", "missing.csv"]);
    assert_eq!(out.status.code(), Some(9));

    let out = ridex(
        d,
        &["gen-graph", "--rows", "1", "--cols", "3", "--out", "net"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let exp = ridex::harness::ExperimentConfig::load(&dir.join("experiment.toml")).unwrap();
    assert_eq!(exp.passengers, 12);
    assert_eq!(exp.fares, ridex::pricing::FareConfig::default());
    assert_eq!(
        ridex::pricing::FareConfig::load(&dir.join("fares.toml")).unwrap(),
        ridex::pricing::FareConfig::default()
    );
    let text = std::fs::read_to_string(dir.join("train.toml")).unwrap();
    assert_eq!(
        ridex::mlp::TrainConfig::from_toml(&text).unwrap(),
        ridex::mlp::TrainConfig::default()
    );
    let prior = std::fs::File::open(dir.join("prior.csv")).unwrap();
    assert_eq!(ridex::game::load_prior(prior).unwrap().len(), 4);
}
