//! End-to-end experiment plumbing: from a network and a fare table to
//! per-passenger scenarios, and from scenarios to a side-by-side report of
//! what each agent would show.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{axis_agent, pbe_agent, random_agent_default, AgentOutput, SelectionSubset};
use crate::assignment::{optimal_assignment, Assignment, RideRequest, DEFAULT_CAPACITY};
use crate::error::{Error, Result};
use crate::explanations::{extract_features, FeatureVector, Scenario, DESCRIPTOR_COUNT};
use crate::mlp::MlpModel;
use crate::pricing::{quote_route, FareConfig};
use crate::roadnet::{
    all_pairs_shortest_paths, generate_grid, load_network_dir, DistanceMatrix, RoadNetwork,
};
use crate::seed;

/// Default snapping cutoff for trip ingestion.
pub const DEFAULT_SNAP_CUTOFF_KM: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Grid {
        rows: usize,
        cols: usize,
        spacing_km: f64,
        #[serde(default)]
        jitter_fraction: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Directory holding `nodes.csv` and `edges.csv`.
    Files { dir: PathBuf },
}

impl NetworkSource {
    pub fn build(&self) -> Result<RoadNetwork> {
        match self {
            NetworkSource::Grid {
                rows,
                cols,
                spacing_km,
                jitter_fraction,
                seed,
            } => generate_grid(*rows, *cols, *spacing_km, *jitter_fraction, *seed),
            NetworkSource::Files { dir } => load_network_dir(dir),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub requests: u64,
    pub labels: u64,
    pub training: u64,
    pub random_agent: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            requests: 1,
            labels: 2,
            training: 3,
            random_agent: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    #[serde(default)]
    pub origin: usize,
    pub passengers: usize,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
    /// Independent request batches; each is assigned separately.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub fares: FareConfig,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_capacity() -> usize {
    DEFAULT_CAPACITY
}

fn default_rounds() -> usize {
    1
}

impl ExperimentConfig {
    pub fn grid(rows: usize, cols: usize, passengers: usize) -> Self {
        Self {
            network: NetworkSource::Grid {
                rows,
                cols,
                spacing_km: 0.5,
                jitter_fraction: 0.2,
                seed: 0,
            },
            origin: 0,
            passengers,
            capacity: DEFAULT_CAPACITY,
            rounds: 1,
            fares: FareConfig::default(),
            seeds: Seeds::default(),
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.fares.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Scenarios plus the assignments they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    pub assignments: Vec<Assignment>,
}

/// One scenario per passenger.
///
/// Each round samples `passengers` destinations uniformly over the nodes
/// other than the origin, solves the assignment exactly, and prices every
/// route. Scenario ids equal passenger ids, which run on across rounds.
pub fn generate_scenarios(cfg: &ExperimentConfig) -> Result<ScenarioSet> {
    let network = cfg.network.build()?;
    let matrix = all_pairs_shortest_paths(&network, cfg.fares.speed_kmh)?;
    generate_scenarios_on(cfg, &matrix)
}

/// [`generate_scenarios`] on a precomputed distance matrix.
pub fn generate_scenarios_on(
    cfg: &ExperimentConfig,
    matrix: &DistanceMatrix,
) -> Result<ScenarioSet> {
    cfg.fares.validate()?;
    if matrix.len() < 2 {
        return Err(Error::Config("network needs at least two nodes".into()));
    }
    if cfg.origin >= matrix.len() {
        return Err(Error::Config(format!(
            "origin {} is not a network node",
            cfg.origin
        )));
    }
    let mut scenarios = Vec::with_capacity(cfg.rounds * cfg.passengers);
    let mut assignments = Vec::with_capacity(cfg.rounds);
    for round in 0..cfg.rounds {
        let mut rng = seed::derived_rng(cfg.seeds.requests, round as u64);
        let requests: Vec<RideRequest> = (0..cfg.passengers)
            .map(|i| {
                let mut dest = rng.gen_range(0..matrix.len() - 1);
                if dest >= cfg.origin {
                    dest += 1;
                }
                RideRequest {
                    passenger_id: (round * cfg.passengers + i) as u32,
                    destination: dest,
                }
            })
            .collect();
        let assignment = optimal_assignment(cfg.origin, &requests, cfg.capacity, matrix)?;
        let mut quotes = BTreeMap::new();
        for route in &assignment.routes {
            quotes.extend(quote_route(route, matrix, &cfg.fares)?);
        }
        scenarios.extend(quotes.into_iter().map(|(pid, quote)| Scenario {
            scenario_id: u64::from(pid),
            quote,
        }));
        assignments.push(assignment);
    }
    Ok(ScenarioSet {
        scenarios,
        assignments,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub requests: Vec<RideRequest>,
    /// Rows whose drop-off lies farther than the cutoff from every node.
    pub skipped: usize,
}

/// Snaps each trip's drop-off to the nearest node. Passenger ids number the
/// accepted rows from 0.
pub fn ingest_trips(
    trips_source: impl Read,
    network: &RoadNetwork,
    cutoff_km: f64,
) -> Result<IngestReport> {
    #[derive(Deserialize)]
    struct TripRow {
        #[allow(dead_code)]
        pickup_x_km: f64,
        #[allow(dead_code)]
        pickup_y_km: f64,
        dropoff_x_km: f64,
        dropoff_y_km: f64,
    }
    let mut requests = Vec::new();
    let mut skipped = 0;
    for row in csv::Reader::from_reader(trips_source).deserialize::<TripRow>() {
        let row = row?;
        match network.nearest_node(row.dropoff_x_km, row.dropoff_y_km) {
            Some((node, d)) if d <= cutoff_km => requests.push(RideRequest {
                passenger_id: requests.len() as u32,
                destination: node,
            }),
            _ => skipped += 1,
        }
    }
    Ok(IngestReport { requests, skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: Scenario,
    pub features: FeatureVector,
    pub pbe: AgentOutput,
    pub random: AgentOutput,
    pub axis: AgentOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenarios: usize,
    pub mean_pbe_facts: f64,
    pub mean_random_selected: f64,
    pub mean_axis_selected: f64,
    /// Share of scenarios in which each explanation index was shown.
    pub random_selection_rate: BTreeMap<usize, f64>,
    pub axis_selection_rate: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

/// Runs the three agents on every scenario.
pub fn run_comparison(
    scenarios: &[Scenario],
    model: &MlpModel,
    subset: &SelectionSubset,
    seed: u64,
) -> Result<RunReport> {
    if scenarios.is_empty() {
        return Err(Error::Input("no scenarios to compare".into()));
    }
    let evaluate = |s: &Scenario| -> Result<ReportRow> {
        Ok(ReportRow {
            scenario: *s,
            features: extract_features(s),
            pbe: pbe_agent(s),
            random: random_agent_default(s, seed)?,
            axis: axis_agent(model, subset, s)?,
        })
    };
    // Every agent is a pure function of (scenario, seed), so chunks can run
    // on separate threads and be concatenated in input order.
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = scenarios.len().div_ceil(threads).max(64);
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(evaluate).collect::<Result<Vec<_>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("agent evaluation panicked"))
            .collect::<Result<Vec<_>>>()
    })?
    .concat();

    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&ReportRow) -> usize| rows.iter().map(f).sum::<usize>() as f64 / n;
    let rates = |f: &dyn Fn(&ReportRow) -> &AgentOutput| {
        let mut counts = [0usize; DESCRIPTOR_COUNT];
        for r in &rows {
            for e in &f(r).selected {
                counts[e.index] += 1;
            }
        }
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, c as f64 / n))
            .collect()
    };
    let summary = Summary {
        scenarios: rows.len(),
        mean_pbe_facts: mean(&|r| r.pbe.size()),
        mean_random_selected: mean(&|r| r.random.size()),
        mean_axis_selected: mean(&|r| r.axis.size()),
        random_selection_rate: rates(&|r| &r.random),
        axis_selection_rate: rates(&|r| &r.axis),
    };
    Ok(RunReport { rows, summary })
}

fn join_indices(out: &AgentOutput) -> String {
    out.selected
        .iter()
        .map(|e| e.index.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

impl RunReport {
    /// One row per scenario, all three agents side by side.
    pub fn write_csv(&self, sink: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header: Vec<String> = [
            "scenario_id",
            "shared_cost_usd",
            "shared_time_min",
            "private_cost_usd",
            "private_time_min",
            "public_cost_usd",
            "public_time_min",
            "co2_saved_kg",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend(FeatureVector::NAMES.iter().map(|n| format!("f_{n}")));
        header.extend(
            [
                "pbe_disclosures",
                "random_count",
                "random_indices",
                "random_texts",
                "axis_count",
                "axis_indices",
                "axis_texts",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        w.write_record(&header)?;
        for r in &self.rows {
            let q = r.scenario.quote;
            let mut rec = vec![r.scenario.scenario_id.to_string()];
            rec.extend(
                [
                    q.shared_cost_usd,
                    q.shared_time_min,
                    q.private_cost_usd,
                    q.private_time_min,
                    q.public_cost_usd,
                    q.public_time_min,
                    q.co2_saved_kg,
                ]
                .iter()
                .chain(r.features.to_array().iter())
                .map(|x| x.to_string()),
            );
            rec.push(r.pbe.disclosures.join(" | "));
            rec.push(r.random.size().to_string());
            rec.push(join_indices(&r.random));
            rec.push(r.random.texts().join(" | "));
            rec.push(r.axis.size().to_string());
            rec.push(join_indices(&r.axis));
            rec.push(r.axis.texts().join(" | "));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}
