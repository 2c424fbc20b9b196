use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ridex::agents::{axis_agent, pbe_agent, random_agent_default, SelectionSubset};
use ridex::assignment::{load_requests, optimal_assignment, write_requests, DEFAULT_CAPACITY};
use ridex::explanations::{read_scenarios, write_scenarios, Scenario};
use ridex::game::{compute_pbe, load_prior, simulate_threshold, unravel, verify_pbe};
use ridex::harness::{
    generate_scenarios, ingest_trips, run_comparison, ExperimentConfig, DEFAULT_SNAP_CUTOFF_KM,
};
use ridex::mlp::{
    read_labeled, synth_labels, train, write_labeled, MlpModel, TeacherRule, TrainConfig,
};
use ridex::pricing::{private_quote, public_quote, FareConfig};
use ridex::roadnet::{
    all_pairs_shortest_paths, generate_grid, load_network_dir, DistanceMatrix, RoadNetwork,
    DEFAULT_SPEED_KMH,
};
use ridex::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ridex",
    version,
    about = "Shared-ride assignment, pricing and explanation toolkit"
)]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Command configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a jittered grid road network into the --out directory.
    GenGraph {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
    },
    /// All-pairs shortest paths of a network, as JSON.
    Apsp {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPEED_KMH)]
        speed_kmh: f64,
    },
    /// Distance-optimal assignment of a request file.
    Assign {
        #[arg(long)]
        net: PathBuf,
        /// Precomputed shortest paths; computed from --net when omitted.
        #[arg(long)]
        apsp: Option<PathBuf>,
        #[arg(long)]
        origin: usize,
        #[arg(long)]
        requests: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
    },
    /// Shared (single rider), private and public quotes for one trip.
    Quote {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        apsp: Option<PathBuf>,
        #[arg(long)]
        origin: usize,
        #[arg(long)]
        dest: usize,
    },
    /// Sample requests, assign and price them, and write one scenario per passenger.
    GenScenarios {
        #[arg(long)]
        passengers: Option<usize>,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Snap trip drop-offs to network nodes and write a request file.
    IngestTrips {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        trips: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SNAP_CUTOFF_KM)]
        cutoff_km: f64,
    },
    /// Label scenarios with the teacher rule plus optional label noise.
    SynthLabels {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        subset: Option<SelectionSubset>,
    },
    /// Train the selector network on labelled scenarios.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Training history and test metrics (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run one agent on every scenario of a file, one JSON object per line.
    Explain {
        #[arg(long, value_enum)]
        agent: AgentArg,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        subset: Option<SelectionSubset>,
    },
    /// Per-scenario selections of all three agents, as CSV.
    AgentsCompare {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        subset: Option<SelectionSubset>,
        /// Summary statistics (JSON).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Disclosure game utilities.
    Game {
        #[command(subcommand)]
        command: GameCommand,
    },
}

#[derive(Subcommand)]
enum GameCommand {
    /// Equilibrium of a prior and its verification.
    Pbe {
        #[arg(long)]
        prior: PathBuf,
    },
    /// Iterated best responses to silence.
    Unravel {
        #[arg(long)]
        prior: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
    },
    /// Expected utilities of a threshold sender.
    Simulate {
        #[arg(long)]
        prior: PathBuf,
        #[arg(long)]
        reveal_above: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AgentArg {
    Pbe,
    Random,
    Axis,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Runs `body` against the --out file, or standard output.
fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
            body(&mut w)?;
            w.flush().map_err(|e| Error::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn write_json(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("value serializes");
    with_output(out, |w| {
        writeln!(w, "{text}").map_err(|e| Error::io("<output>", e))
    })
}

fn fare_config(path: Option<&Path>) -> Result<FareConfig> {
    path.map_or_else(|| Ok(FareConfig::default()), FareConfig::load)
}

fn network_and_matrix(
    net: &Path,
    apsp: Option<&Path>,
    speed_kmh: f64,
) -> Result<(RoadNetwork, DistanceMatrix)> {
    let network = load_network_dir(net)?;
    let matrix = match apsp {
        Some(path) => {
            let m = DistanceMatrix::load(path)?;
            if m.len() != network.node_count() {
                return Err(Error::Input(format!(
                    "{} covers {} nodes but the network has {}",
                    path.display(),
                    m.len(),
                    network.node_count()
                )));
            }
            m
        }
        None => all_pairs_shortest_paths(&network, speed_kmh)?,
    };
    Ok((network, matrix))
}

fn load_model(path: Option<&Path>) -> Result<MlpModel> {
    match path {
        Some(p) if !p.as_os_str().is_empty() => MlpModel::load_path(p),
        _ => Err(Error::Config(
            "the learned agent needs a --model file".into(),
        )),
    }
}

fn json_line(w: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string(value).expect("value serializes");
    writeln!(w, "{text}").map_err(|e| Error::io("<output>", e))
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let config = cli.config.as_deref();
    match cli.command {
        Command::GenGraph {
            rows,
            cols,
            spacing,
            jitter,
        } => {
            let dir = out.ok_or_else(|| Error::Input("gen-graph needs --out DIR".into()))?;
            let network = generate_grid(rows, cols, spacing, jitter, cli.seed.unwrap_or(0))?;
            network.save_dir(dir)?;
            eprintln!(
                "wrote {} nodes and {} edges to {}",
                network.node_count(),
                network.edges().len(),
                dir.display()
            );
            Ok(())
        }
        Command::Apsp { net, speed_kmh } => {
            let matrix = all_pairs_shortest_paths(&load_network_dir(&net)?, speed_kmh)?;
            with_output(out, |w| {
                writeln!(w, "{}", matrix.to_json()).map_err(|e| Error::io("<output>", e))
            })
        }
        Command::Assign {
            net,
            apsp,
            origin,
            requests,
            capacity,
        } => {
            let fares = fare_config(config)?;
            let (_, matrix) = network_and_matrix(&net, apsp.as_deref(), fares.speed_kmh)?;
            let requests = load_requests(open(&requests)?)?;
            let assignment = optimal_assignment(origin, &requests, capacity, &matrix)?;
            write_json(out, &assignment)
        }
        Command::Quote {
            net,
            apsp,
            origin,
            dest,
        } => {
            let fares = fare_config(config)?;
            let (_, matrix) = network_and_matrix(&net, apsp.as_deref(), fares.speed_kmh)?;
            let private = private_quote(origin, dest, &matrix, &fares)?;
            let public = public_quote(origin, dest, &matrix, &fares)?;
            #[derive(Serialize)]
            struct Quotes {
                origin: usize,
                dest: usize,
                shared_cost_usd: f64,
                shared_time_min: f64,
                private: ridex::pricing::PrivateQuote,
                public: ridex::pricing::PublicQuote,
            }
            write_json(
                out,
                &Quotes {
                    origin,
                    dest,
                    shared_cost_usd: private.cost_usd,
                    shared_time_min: private.time_min,
                    private,
                    public,
                },
            )
        }
        Command::GenScenarios { passengers, rounds } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::grid(10, 10, 12),
            };
            if let Some(n) = passengers {
                cfg.passengers = n;
            }
            if let Some(r) = rounds {
                cfg.rounds = r;
            }
            if let Some(s) = cli.seed {
                cfg.seeds.requests = s;
            }
            let set = generate_scenarios(&cfg)?;
            let visited: u64 = set
                .assignments
                .iter()
                .map(|a| a.stats.partitions_visited)
                .sum();
            eprintln!(
                "{} scenarios from {} rounds, {} partitions visited",
                set.scenarios.len(),
                set.assignments.len(),
                visited
            );
            let default_out = cfg.output_dir.as_ref().map(|d| d.join("scenarios.csv"));
            with_output(out.or(default_out.as_deref()), |w| {
                write_scenarios(&set.scenarios, w)
            })
        }
        Command::IngestTrips {
            net,
            trips,
            cutoff_km,
        } => {
            let network = load_network_dir(&net)?;
            let report = ingest_trips(open(&trips)?, &network, cutoff_km)?;
            if report.skipped > 0 {
                eprintln!(
                    "warning: skipped {} trips farther than {cutoff_km} km from every node",
                    report.skipped
                );
            }
            with_output(out, |w| write_requests(&report.requests, w))
        }
        Command::SynthLabels {
            scenarios,
            noise,
            subset,
        } => {
            let scenarios = read_scenarios(open(&scenarios)?)?;
            let subset = subset.unwrap_or_default();
            let rows = synth_labels(
                &scenarios,
                &subset,
                &TeacherRule::default(),
                noise,
                cli.seed.unwrap_or(0),
            )?;
            with_output(out, |w| write_labeled(&rows, &subset, w))
        }
        Command::Train { data, report } => {
            let mut cfg = match config {
                Some(path) => TrainConfig::from_toml(&read_text(path)?)?,
                None => TrainConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let (rows, subset) = read_labeled(open(&data)?)?;
            let (model, history) = train(&rows, &cfg)?;
            eprintln!(
                "best epoch {} of {}, test per-label accuracy {:.4} on {} rows (subset {:?})",
                history.best_epoch,
                history.epochs.len(),
                history.test.per_label_accuracy,
                history.test.rows,
                subset.indices()
            );
            with_output(out, |w| model.save(w))?;
            if let Some(path) = report {
                write_json(Some(&path), &history)?;
            }
            Ok(())
        }
        Command::Explain {
            agent,
            scenario,
            model,
            subset,
        } => {
            let model = match agent {
                AgentArg::Axis => Some(load_model(model.as_deref())?),
                _ => None,
            };
            let subset = subset.unwrap_or_default();
            let scenarios: Vec<Scenario> = read_scenarios(open(&scenario)?)?;
            let seed = cli.seed.unwrap_or(0);
            with_output(out, |w| {
                for s in &scenarios {
                    let output = match (agent, &model) {
                        (AgentArg::Pbe, _) => pbe_agent(s),
                        (AgentArg::Random, _) => random_agent_default(s, seed)?,
                        (AgentArg::Axis, Some(m)) => axis_agent(m, &subset, s)?,
                        (AgentArg::Axis, None) => unreachable!("model loaded above"),
                    };
                    json_line(w, &output)?;
                }
                Ok(())
            })
        }
        Command::AgentsCompare {
            scenarios,
            model,
            subset,
            summary,
        } => {
            let model = load_model(Some(&model))?;
            let scenarios = read_scenarios(open(&scenarios)?)?;
            let report = run_comparison(
                &scenarios,
                &model,
                &subset.unwrap_or_default(),
                cli.seed.unwrap_or(0),
            )?;
            with_output(out, |w| report.write_csv(w))?;
            let s = &report.summary;
            eprintln!(
                "{} scenarios; mean shown: pbe {:.3}, random {:.3}, axis {:.3}",
                s.scenarios, s.mean_pbe_facts, s.mean_random_selected, s.mean_axis_selected
            );
            if let Some(path) = summary {
                write_json(Some(&path), &report.summary)?;
            }
            Ok(())
        }
        Command::Game { command } => match command {
            GameCommand::Pbe { prior } => {
                let prior = load_prior(open(&prior)?)?;
                let pbe = compute_pbe(&prior);
                let verdict = verify_pbe(&prior, &pbe.sender, &pbe.receiver, &pbe.quiet_belief)?;
                #[derive(Serialize)]
                struct Report {
                    equilibrium: ridex::game::PbeResult,
                    verdict: ridex::game::Verdict,
                    is_equilibrium: bool,
                }
                write_json(
                    out,
                    &Report {
                        is_equilibrium: verdict.is_equilibrium(),
                        equilibrium: pbe,
                        verdict,
                    },
                )
            }
            GameCommand::Unravel { prior, max_iters } => {
                let prior = load_prior(open(&prior)?)?;
                write_json(out, &unravel(&prior, max_iters))
            }
            GameCommand::Simulate {
                prior,
                reveal_above,
            } => {
                let prior = load_prior(open(&prior)?)?;
                write_json(out, &simulate_threshold(&prior, reveal_above)?)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
