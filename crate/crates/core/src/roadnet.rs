//! Road networks and all-pairs shortest paths.
//!
//! A [`RoadNetwork`] is a validated geometric graph. Networks come either from
//! the jittered-grid generator ([`generate_grid`]) or from a pair of CSV files
//! ([`load_network`]). [`all_pairs_shortest_paths`] turns a network into a
//! dense [`DistanceMatrix`] with next-hop data for path reconstruction.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Driving speed applied to edges that carry no explicit travel time.
pub const DEFAULT_SPEED_KMH: f64 = 30.0;

/// Largest network accepted by [`all_pairs_shortest_paths`].
pub const MAX_NODES: usize = 2_000;

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";

const MATRIX_FORMAT: &str = "ridex-apsp";
const MATRIX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub node_id: usize,
    pub x_km: f64,
    pub y_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub distance_km: f64,
    pub time_min: Option<f64>,
}

/// A validated road graph.
///
/// Node ids are contiguous from zero and `nodes[i].node_id == i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    directed: bool,
}

impl RoadNetwork {
    /// Validates and builds a network. Nodes may be given in any order.
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>, directed: bool) -> Result<Self> {
        nodes.sort_by_key(|n| n.node_id);
        for pair in nodes.windows(2) {
            if pair[0].node_id == pair[1].node_id {
                return Err(Error::Validation(format!(
                    "duplicate node id {}",
                    pair[0].node_id
                )));
            }
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.node_id != i {
                return Err(Error::Validation(format!(
                    "node ids must be contiguous from 0; missing id {i}"
                )));
            }
            if !node.x_km.is_finite() || !node.y_km.is_finite() {
                return Err(Error::Validation(format!(
                    "node {i} has non-finite coordinates"
                )));
            }
        }
        for edge in &edges {
            for end in [edge.u, edge.v] {
                if end >= nodes.len() {
                    return Err(Error::Validation(format!(
                        "edge {}-{} references missing node {end}",
                        edge.u, edge.v
                    )));
                }
            }
            if !(edge.distance_km > 0.0 && edge.distance_km.is_finite()) {
                return Err(Error::Validation(format!(
                    "edge {}-{} has non-positive distance {}",
                    edge.u, edge.v, edge.distance_km
                )));
            }
            if let Some(t) = edge.time_min {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Validation(format!(
                        "edge {}-{} has non-positive time {t}",
                        edge.u, edge.v
                    )));
                }
            }
        }
        Ok(Self {
            nodes,
            edges,
            directed,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nearest node to a point, by Euclidean distance in the network frame.
    /// Ties go to the lower id. Returns `None` for an empty network.
    pub fn nearest_node(&self, x_km: f64, y_km: f64) -> Option<(usize, f64)> {
        self.nodes
            .iter()
            .map(|n| (n.node_id, (n.x_km - x_km).hypot(n.y_km - y_km)))
            .fold(None, |best, cand| match best {
                Some((_, d)) if d <= cand.1 => best,
                _ => Some(cand),
            })
    }

    /// Writes `nodes.csv` and `edges.csv` into `dir`, creating it if needed.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let nodes_path = dir.join(NODES_FILE);
        let mut w = csv::Writer::from_path(&nodes_path)?;
        for node in &self.nodes {
            w.serialize(node)?;
        }
        w.flush().map_err(|e| Error::io(&nodes_path, e))?;

        let edges_path = dir.join(EDGES_FILE);
        let mut w = csv::Writer::from_path(&edges_path)?;
        for edge in &self.edges {
            w.serialize(edge)?;
        }
        w.flush().map_err(|e| Error::io(&edges_path, e))?;
        Ok(())
    }
}

/// Generates a `rows × cols` grid with jittered node positions.
///
/// Each coordinate moves by at most `jitter_fraction × spacing_km` per axis
/// and edge lengths are the Euclidean distances between endpoints, so with
/// `jitter_fraction ≤ 0.4` every edge stays strictly positive.
pub fn generate_grid(
    rows: usize,
    cols: usize,
    spacing_km: f64,
    jitter_fraction: f64,
    seed: u64,
) -> Result<RoadNetwork> {
    if rows < 2 || cols < 2 {
        return Err(Error::Input(format!(
            "grid needs at least 2 rows and 2 columns, got {rows}x{cols}"
        )));
    }
    if rows * cols > MAX_NODES {
        return Err(Error::Input(format!(
            "grid of {} nodes exceeds the {MAX_NODES}-node cap",
            rows * cols
        )));
    }
    if !(spacing_km > 0.0 && spacing_km.is_finite()) {
        return Err(Error::Input(format!(
            "spacing must be positive, got {spacing_km}"
        )));
    }
    if !(0.0..=0.4).contains(&jitter_fraction) {
        return Err(Error::Input(format!(
            "jitter fraction must lie in [0, 0.4], got {jitter_fraction}"
        )));
    }

    let mut rng = seed::rng(seed);
    let max_shift = jitter_fraction * spacing_km;
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let (dx, dy) = if max_shift > 0.0 {
                (
                    rng.gen_range(-max_shift..=max_shift),
                    rng.gen_range(-max_shift..=max_shift),
                )
            } else {
                (0.0, 0.0)
            };
            nodes.push(Node {
                node_id: r * cols + c,
                x_km: c as f64 * spacing_km + dx,
                y_km: r as f64 * spacing_km + dy,
            });
        }
    }

    let link = |a: usize, b: usize| {
        let (na, nb) = (&nodes[a], &nodes[b]);
        Edge {
            u: a,
            v: b,
            distance_km: (na.x_km - nb.x_km).hypot(na.y_km - nb.y_km),
            time_min: None,
        }
    };
    let mut edges = Vec::with_capacity(2 * rows * cols - rows - cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                edges.push(link(id, id + 1));
            }
            if r + 1 < rows {
                edges.push(link(id, id + cols));
            }
        }
    }
    RoadNetwork::new(nodes, edges, false)
}

/// Reads a network from the nodes and edges CSV layouts
/// (`node_id,x_km,y_km` and `u,v,distance_km,time_min`).
pub fn load_network(nodes_source: impl Read, edges_source: impl Read) -> Result<RoadNetwork> {
    let mut nodes = Vec::new();
    for row in csv::Reader::from_reader(nodes_source).deserialize() {
        nodes.push(row?);
    }
    let mut edges = Vec::new();
    for row in csv::Reader::from_reader(edges_source).deserialize() {
        edges.push(row?);
    }
    RoadNetwork::new(nodes, edges, false)
}

/// Reads `nodes.csv` and `edges.csv` from a directory.
pub fn load_network_dir(dir: &Path) -> Result<RoadNetwork> {
    let open = |name: &str| {
        let path = dir.join(name);
        File::open(&path).map_err(|e| Error::io(path, e))
    };
    load_network(open(NODES_FILE)?, open(EDGES_FILE)?)
}

/// Dense all-pairs shortest distances and travel times.
///
/// Unreachable pairs hold `f64::INFINITY` and no next hop. Times are measured
/// along the distance-shortest path.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist_km: Vec<f64>,
    time_min: Vec<f64>,
    next_hop: Vec<Option<usize>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, from: usize, to: usize) -> f64 {
        self.dist_km[from * self.n + to]
    }

    pub fn time(&self, from: usize, to: usize) -> f64 {
        self.time_min[from * self.n + to]
    }

    pub fn next_hop(&self, from: usize, to: usize) -> Option<usize> {
        self.next_hop[from * self.n + to]
    }

    pub fn is_reachable(&self, from: usize, to: usize) -> bool {
        self.dist(from, to).is_finite()
    }

    /// Distance and time of a reachable pair, or a routing error.
    pub fn leg(&self, from: usize, to: usize) -> Result<(f64, f64)> {
        if from >= self.n || to >= self.n {
            return Err(Error::Input(format!(
                "node pair ({from}, {to}) outside a {}-node matrix",
                self.n
            )));
        }
        if !self.is_reachable(from, to) {
            return Err(Error::Unreachable { from, node: to });
        }
        Ok((self.dist(from, to), self.time(from, to)))
    }

    /// Node sequence of the stored shortest path, endpoints included.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if !self.is_reachable(from, to) {
            return None;
        }
        let mut path = vec![from];
        let mut at = from;
        while at != to {
            at = self.next_hop(at, to)?;
            path.push(at);
            if path.len() > self.n {
                return None;
            }
        }
        Some(path)
    }

    pub fn to_json(&self) -> String {
        let rows = |data: &[f64]| -> Vec<Vec<Option<f64>>> {
            data.chunks(self.n.max(1))
                .take(self.n)
                .map(|r| r.iter().map(|&v| v.is_finite().then_some(v)).collect())
                .collect()
        };
        let wire = MatrixFile {
            format: MATRIX_FORMAT.to_owned(),
            version: MATRIX_VERSION,
            n: self.n,
            dist_km: rows(&self.dist_km),
            time_min: rows(&self.time_min),
            next_hop: self
                .next_hop
                .chunks(self.n.max(1))
                .take(self.n)
                .map(<[_]>::to_vec)
                .collect(),
        };
        serde_json::to_string(&wire).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        if wire.format != MATRIX_FORMAT {
            return Err(Error::Validation(format!(
                "not a distance matrix file: format {:?}",
                wire.format
            )));
        }
        if wire.version != MATRIX_VERSION {
            return Err(Error::Version {
                what: "distance matrix",
                found: wire.version,
                expected: MATRIX_VERSION,
            });
        }
        let n = wire.n;
        let square = |name: &str, len: usize, rows: &[usize]| {
            if len != n || rows.iter().any(|&r| r != n) {
                Err(Error::Validation(format!("{name} is not {n}x{n}")))
            } else {
                Ok(())
            }
        };
        square(
            "dist_km",
            wire.dist_km.len(),
            &wire.dist_km.iter().map(Vec::len).collect::<Vec<_>>(),
        )?;
        square(
            "time_min",
            wire.time_min.len(),
            &wire.time_min.iter().map(Vec::len).collect::<Vec<_>>(),
        )?;
        square(
            "next_hop",
            wire.next_hop.len(),
            &wire.next_hop.iter().map(Vec::len).collect::<Vec<_>>(),
        )?;
        let flat = |rows: Vec<Vec<Option<f64>>>| {
            rows.into_iter()
                .flatten()
                .map(|v| v.unwrap_or(f64::INFINITY))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            n,
            dist_km: flat(wire.dist_km),
            time_min: flat(wire.time_min),
            next_hop: wire.next_hop.into_iter().flatten().collect(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_json().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    format: String,
    version: u32,
    n: usize,
    dist_km: Vec<Vec<Option<f64>>>,
    time_min: Vec<Vec<Option<f64>>>,
    next_hop: Vec<Vec<Option<usize>>>,
}

/// Floyd–Warshall over edge distances.
///
/// Edges without an explicit time are timed at `speed_kmh`. Parallel edges
/// keep the shortest one. A pair's time is accumulated along the path chosen
/// for its distance; distance ties keep the earlier path.
pub fn all_pairs_shortest_paths(network: &RoadNetwork, speed_kmh: f64) -> Result<DistanceMatrix> {
    if !(speed_kmh > 0.0 && speed_kmh.is_finite()) {
        return Err(Error::Input(format!(
            "speed must be positive, got {speed_kmh}"
        )));
    }
    let n = network.node_count();
    if n > MAX_NODES {
        return Err(Error::Input(format!(
            "{n} nodes exceeds the {MAX_NODES}-node cap"
        )));
    }

    let mut dist = vec![f64::INFINITY; n * n];
    let mut time = vec![f64::INFINITY; n * n];
    let mut next: Vec<Option<usize>> = vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
        time[i * n + i] = 0.0;
        next[i * n + i] = Some(i);
    }

    let mut relax_edge = |a: usize, b: usize, d: f64, t: f64| {
        let ab = a * n + b;
        if d < dist[ab] || (d == dist[ab] && t < time[ab]) {
            dist[ab] = d;
            time[ab] = t;
            next[ab] = Some(b);
        }
    };
    for edge in network.edges() {
        if edge.u == edge.v {
            continue;
        }
        let t = edge.time_min.unwrap_or(edge.distance_km / speed_kmh * 60.0);
        relax_edge(edge.u, edge.v, edge.distance_km, t);
        if !network.is_directed() {
            relax_edge(edge.v, edge.u, edge.distance_km, t);
        }
    }

    let mut row_k_dist = vec![0.0; n];
    let mut row_k_time = vec![0.0; n];
    for k in 0..n {
        row_k_dist.copy_from_slice(&dist[k * n..(k + 1) * n]);
        row_k_time.copy_from_slice(&time[k * n..(k + 1) * n]);
        for i in 0..n {
            let ik = i * n + k;
            let d_ik = dist[ik];
            if d_ik == f64::INFINITY {
                continue;
            }
            let t_ik = time[ik];
            let hop = next[ik];
            let row = i * n;
            for j in 0..n {
                let cand = d_ik + row_k_dist[j];
                if cand < dist[row + j] {
                    dist[row + j] = cand;
                    time[row + j] = t_ik + row_k_time[j];
                    next[row + j] = hop;
                }
            }
        }
    }

    Ok(DistanceMatrix {
        n,
        dist_km: dist,
        time_min: time,
        next_hop: next,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: usize, x: f64, y: f64) -> Node {
        Node {
            node_id: id,
            x_km: x,
            y_km: y,
        }
    }

    fn edge(u: usize, v: usize, d: f64) -> Edge {
        Edge {
            u,
            v,
            distance_km: d,
            time_min: None,
        }
    }

    fn line_nodes(n: usize) -> Vec<Node> {
        (0..n).map(|i| node(i, i as f64, 0.0)).collect()
    }

    #[test]
    fn unit_square_grid() {
        let net = generate_grid(2, 2, 1.0, 0.0, 0).unwrap();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.edges().len(), 4);
        assert!(net.edges().iter().all(|e| e.distance_km == 1.0));
    }

    #[test]
    fn grid_edge_count() {
        let net = generate_grid(3, 3, 1.0, 0.0, 0).unwrap();
        assert_eq!(net.node_count(), 9);
        assert_eq!(net.edges().len(), 12);
    }

    #[test]
    fn grid_is_deterministic_and_bounded() {
        let a = generate_grid(5, 5, 0.5, 0.2, 7).unwrap();
        let b = generate_grid(5, 5, 0.5, 0.2, 7).unwrap();
        assert_eq!(a, b);
        for n in a.nodes() {
            let (r, c) = (n.node_id / 5, n.node_id % 5);
            assert!((n.x_km - c as f64 * 0.5).abs() <= 0.1 + 1e-12);
            assert!((n.y_km - r as f64 * 0.5).abs() <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(matches!(
            generate_grid(1, 3, 1.0, 0.0, 0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            generate_grid(3, 3, 0.0, 0.0, 0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            generate_grid(3, 3, 1.0, 0.5, 0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            generate_grid(3, 3, 1.0, -0.1, 0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn load_echoes_edge() {
        let nodes = "node_id,x_km,y_km\n0,0,0\n1,3.5,0\n";
        let edges = "u,v,distance_km,time_min\n0,1,3.5,\n";
        let net = load_network(nodes.as_bytes(), edges.as_bytes()).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.edges()[0].distance_km, 3.5);
        assert_eq!(net.edges()[0].time_min, None);
    }

    #[test]
    fn load_rejects_dangling_edge() {
        let nodes = "node_id,x_km,y_km\n0,0,0\n1,1,0\n";
        let edges = "u,v,distance_km,time_min\n0,99,1.0,\n";
        let err = load_network(nodes.as_bytes(), edges.as_bytes()).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("99")),
            "{err}"
        );
    }

    #[test]
    fn load_rejects_duplicate_id() {
        let nodes = "node_id,x_km,y_km\n0,0,0\n4,1,0\n4,2,0\n";
        let edges = "u,v,distance_km,time_min\n";
        let err = load_network(nodes.as_bytes(), edges.as_bytes()).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("duplicate")),
            "{err}"
        );
    }

    #[test]
    fn load_rejects_non_positive_distance() {
        let nodes = "node_id,x_km,y_km\n0,0,0\n1,1,0\n";
        let edges = "u,v,distance_km,time_min\n0,1,0,\n";
        assert!(matches!(
            load_network(nodes.as_bytes(), edges.as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_reports_line_of_malformed_row() {
        let nodes = "node_id,x_km,y_km\n0,0,0\n1,abc,0\n";
        let edges = "u,v,distance_km,time_min\n";
        match load_network(nodes.as_bytes(), edges.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn path_graph_distance() {
        let net =
            RoadNetwork::new(line_nodes(3), vec![edge(0, 1, 1.0), edge(1, 2, 2.0)], false).unwrap();
        let m = all_pairs_shortest_paths(&net, 30.0).unwrap();
        assert_eq!(m.dist(0, 2), 3.0);
        assert_eq!(m.path(0, 2), Some(vec![0, 1, 2]));
        assert_eq!(m.time(0, 2), 6.0);
    }

    #[test]
    fn triangle_detour() {
        let net = RoadNetwork::new(
            line_nodes(3),
            vec![edge(0, 1, 1.0), edge(1, 2, 1.0), edge(0, 2, 5.0)],
            false,
        )
        .unwrap();
        let m = all_pairs_shortest_paths(&net, 30.0).unwrap();
        assert_eq!(m.dist(0, 2), 2.0);
        assert_eq!(m.dist(2, 0), 2.0);
    }

    #[test]
    fn explicit_times_follow_distance_path() {
        let mut e = edge(0, 1, 1.0);
        e.time_min = Some(10.0);
        let net = RoadNetwork::new(line_nodes(2), vec![e], false).unwrap();
        let m = all_pairs_shortest_paths(&net, 30.0).unwrap();
        assert_eq!(m.time(1, 0), 10.0);
    }

    #[test]
    fn disconnected_pair_is_sentinel() {
        let net = RoadNetwork::new(line_nodes(3), vec![edge(0, 1, 1.0)], false).unwrap();
        let m = all_pairs_shortest_paths(&net, 30.0).unwrap();
        assert!(!m.is_reachable(0, 2));
        assert_eq!(m.next_hop(0, 2), None);
        assert!(matches!(
            m.leg(0, 2),
            Err(Error::Unreachable { node: 2, .. })
        ));
    }

    #[test]
    fn directed_edges_are_one_way() {
        let net = RoadNetwork::new(line_nodes(2), vec![edge(0, 1, 1.0)], true).unwrap();
        let m = all_pairs_shortest_paths(&net, 30.0).unwrap();
        assert_eq!(m.dist(0, 1), 1.0);
        assert!(!m.is_reachable(1, 0));
    }

    #[test]
    fn matrix_json_round_trip() {
        let net = RoadNetwork::new(
            line_nodes(4),
            vec![edge(0, 1, 1.25), edge(1, 2, 0.1)],
            false,
        )
        .unwrap();
        let m = all_pairs_shortest_paths(&net, 27.0).unwrap();
        let back = DistanceMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_json_version_mismatch() {
        let net = RoadNetwork::new(line_nodes(2), vec![edge(0, 1, 1.0)], false).unwrap();
        let text = all_pairs_shortest_paths(&net, 30.0)
            .unwrap()
            .to_json()
            .replace("\"version\":1", "\"version\":2");
        assert!(matches!(
            DistanceMatrix::from_json(&text),
            Err(Error::Version { found: 2, .. })
        ));
    }

    #[test]
    fn nearest_node_prefers_lower_id_on_tie() {
        let net =
            RoadNetwork::new(vec![node(0, 0.0, 0.0), node(1, 2.0, 0.0)], vec![], false).unwrap();
        assert_eq!(net.nearest_node(1.0, 0.0), Some((0, 1.0)));
        assert_eq!(net.nearest_node(2.0, 0.0), Some((1, 0.0)));
    }
}
