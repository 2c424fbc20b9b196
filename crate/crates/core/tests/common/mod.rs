//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's own search code; only plain data
//! types and the distance matrix accessors are shared.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ridex::assignment::RideRequest;
use ridex::explanations::Scenario;
use ridex::mlp::{Example, MlpModel};
use ridex::pricing::TripQuote;
use ridex::roadnet::{DistanceMatrix, Edge, Node, RoadNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- graphs

/// Random connected undirected graph: a random spanning tree plus extra
/// edges, with some parallel edges and explicit times mixed in.
pub fn random_connected_graph(r: &mut ChaCha8Rng, n: usize, extra: usize) -> RoadNetwork {
    let nodes = (0..n)
        .map(|i| Node {
            node_id: i,
            x_km: r.gen_range(0.0..10.0),
            y_km: r.gen_range(0.0..10.0),
        })
        .collect();
    let mut edges = Vec::new();
    let edge = |r: &mut ChaCha8Rng, u: usize, v: usize| Edge {
        u,
        v,
        distance_km: r.gen_range(0.05..5.0),
        time_min: if r.gen_bool(0.3) {
            Some(r.gen_range(0.1..12.0))
        } else {
            None
        },
    };
    for v in 1..n {
        let u = r.gen_range(0..v);
        edges.push(edge(r, u, v));
    }
    for _ in 0..extra {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u != v {
            edges.push(edge(r, u, v));
        }
    }
    RoadNetwork::new(nodes, edges, false).unwrap()
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap()
            .then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest distances from `source` by binary-heap Dijkstra.
pub fn dijkstra(network: &RoadNetwork, source: usize) -> Vec<f64> {
    let n = network.node_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in network.edges() {
        adj[e.u].push((e.v, e.distance_km));
        if !network.is_directed() {
            adj[e.v].push((e.u, e.distance_km));
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(HeapItem(dist[v], v));
            }
        }
    }
    dist
}

// ----------------------------------------------------------- partitions

/// Partitions of `0..n` with blocks of at most `max_block`, by restricted
/// growth strings. Blocks come out ordered by smallest element.
pub fn naive_partitions(n: usize, max_block: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(
        i: usize,
        n: usize,
        max_block: usize,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].len() < max_block {
                blocks[b].push(i);
                go(i + 1, n, max_block, blocks, out);
                blocks[b].pop();
            }
        }
        blocks.push(vec![i]);
        go(i + 1, n, max_block, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, max_block, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// a(n) = Σ_{k=1..m} C(n−1, k−1) a(n−k), a(0) = 1.
pub fn recurrence_count(n: usize, max_block: usize) -> u64 {
    let mut a = vec![1u64];
    for i in 1..=n {
        let v = (1..=max_block.min(i))
            .map(|k| binomial(i as u64 - 1, k as u64 - 1) * a[i - k])
            .sum();
        a.push(v);
    }
    a[n]
}

// ---------------------------------------------------------------- routes

/// Every ordering of `items`, by Heap's algorithm.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    fn heap<T: Clone>(k: usize, a: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    let mut a = items.to_vec();
    let mut out = Vec::new();
    heap(a.len(), &mut a, &mut out);
    out
}

pub fn path_km(origin: usize, stops: &[RideRequest], matrix: &DistanceMatrix) -> f64 {
    let mut at = origin;
    let mut total = 0.0;
    for s in stops {
        total += matrix.dist(at, s.destination);
        at = s.destination;
    }
    total
}

/// Shortest open path through a block, ties to the lexicographically
/// smallest `(destination, passenger_id)` sequence.
pub fn permutation_oracle(
    origin: usize,
    block: &[RideRequest],
    matrix: &DistanceMatrix,
) -> (f64, Vec<RideRequest>) {
    let key = |p: &[RideRequest]| -> Vec<(usize, u32)> {
        p.iter().map(|r| (r.destination, r.passenger_id)).collect()
    };
    let mut best: Option<(f64, Vec<RideRequest>)> = None;
    for p in permutations(block) {
        let c = path_km(origin, &p, matrix);
        let better = match &best {
            None => true,
            Some((bc, bp)) => c < *bc || (c == *bc && key(&p) < key(bp)),
        };
        if better {
            best = Some((c, p));
        }
    }
    best.unwrap()
}

/// Minimum total distance over every bounded partition, no memoization.
/// Block costs are summed in leader order.
pub fn brute_force_objective(
    origin: usize,
    requests: &[RideRequest],
    capacity: usize,
    matrix: &DistanceMatrix,
) -> f64 {
    naive_partitions(requests.len(), capacity)
        .iter()
        .map(|blocks| {
            blocks.iter().fold(0.0, |acc, b| {
                let members: Vec<RideRequest> = b.iter().map(|&i| requests[i]).collect();
                acc + permutation_oracle(origin, &members, matrix).0
            })
        })
        .fold(f64::INFINITY, f64::min)
}

// ----------------------------------------------------------------- game

/// Arg-max of expected `−(a − Y)²` on a grid over `[lo, hi]`.
pub fn grid_best_response(support: &[f64], probs: &[f64], lo: f64, hi: f64, step: f64) -> f64 {
    let steps = ((hi - lo) / step).round() as usize;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=steps {
        let a = lo + i as f64 * step;
        let u: f64 = support
            .iter()
            .zip(probs)
            .map(|(y, p)| -p * (a - y).powi(2))
            .sum();
        if u > best.0 {
            best = (u, a);
        }
    }
    best.1
}

// ------------------------------------------------------------------ mlp

/// Central-difference gradient of the batch loss for every parameter, in the
/// same layout as the model's weights and biases.
pub fn finite_difference(
    model: &MlpModel,
    batch: &[Example],
    h: f64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut m = model.clone();
    let mut numeric = |get: &mut dyn FnMut(&mut MlpModel) -> &mut f64| -> f64 {
        let orig = *get(&mut m);
        *get(&mut m) = orig + h;
        let up = ridex::mlp::loss(&m, batch);
        *get(&mut m) = orig - h;
        let down = ridex::mlp::loss(&m, batch);
        *get(&mut m) = orig;
        (up - down) / (2.0 * h)
    };
    let mut gw = Vec::new();
    let mut gb = Vec::new();
    for l in 0..model.weights.len() {
        gw.push(
            (0..model.weights[l].len())
                .map(|i| numeric(&mut |m: &mut MlpModel| &mut m.weights[l][i]))
                .collect(),
        );
        gb.push(
            (0..model.biases[l].len())
                .map(|i| numeric(&mut |m: &mut MlpModel| &mut m.biases[l][i]))
                .collect(),
        );
    }
    (gw, gb)
}

// ------------------------------------------------------------ scenarios

/// Shared 7.53 / 13 min, private 13.83 / 12 min, transit 2.50 / 26 min.
pub fn worked_scenario() -> Scenario {
    Scenario {
        scenario_id: 1,
        quote: TripQuote {
            shared_cost_usd: 7.53,
            shared_time_min: 13.0,
            private_cost_usd: 13.83,
            private_time_min: 12.0,
            public_cost_usd: 2.50,
            public_time_min: 26.0,
            co2_saved_kg: 0.5,
        },
    }
}

/// Plausible random quote, not derived from any network.
pub fn random_scenario(r: &mut ChaCha8Rng, id: u64) -> Scenario {
    let private_time = r.gen_range(3.0..40.0);
    let private_cost = 2.5 + r.gen_range(1.0..30.0);
    Scenario {
        scenario_id: id,
        quote: TripQuote {
            shared_cost_usd: private_cost * r.gen_range(0.3..1.0),
            shared_time_min: private_time * r.gen_range(1.0..2.0),
            private_cost_usd: private_cost,
            private_time_min: private_time,
            public_cost_usd: 2.5 * r.gen_range(1..=3) as f64,
            public_time_min: private_time * 1.6 + 8.0,
            co2_saved_kg: r.gen_range(0.0..3.0),
        },
    }
}
