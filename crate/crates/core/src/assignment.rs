//! Exact assignment of passengers sharing one origin to capacity-bounded
//! vehicles.
//!
//! The search visits every set partition of the passengers into blocks of at
//! most `capacity` and routes each block by trying every visit order. Block
//! routes are computed once per destination subset before the sweep, so the
//! sweep itself only sums table entries.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roadnet::DistanceMatrix;

/// Largest passenger count accepted by [`optimal_assignment`].
pub const MAX_PASSENGERS: usize = 12;
/// Largest vehicle capacity accepted by [`optimal_assignment`].
pub const MAX_CAPACITY: usize = 4;
/// Default vehicle capacity.
pub const DEFAULT_CAPACITY: usize = 4;
/// Largest element count accepted by the partition enumerator.
pub const MAX_PARTITION_ELEMENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RideRequest {
    pub passenger_id: u32,
    #[serde(rename = "destination_node")]
    pub destination: usize,
}

/// Where one passenger leaves the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drop {
    pub ride_distance_km: f64,
    pub ride_time_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub from: usize,
    pub to: usize,
    pub distance_km: f64,
    pub time_min: f64,
}

/// One vehicle's block of passengers and its open-path route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRoute {
    pub origin: usize,
    /// Passenger ids, ascending.
    pub block: Vec<u32>,
    /// Passenger ids in drop-off order.
    pub passenger_order: Vec<u32>,
    /// Destinations in drop-off order.
    pub visit_order: Vec<usize>,
    pub legs: Vec<Leg>,
    pub total_distance_km: f64,
    pub total_time_min: f64,
    pub per_passenger: BTreeMap<u32, Drop>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub partitions_visited: u64,
    pub memo_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Routes ordered by the smallest request index in their block.
    pub routes: Vec<VehicleRoute>,
    pub objective_km: f64,
    pub stats: SearchStats,
}

impl Assignment {
    pub fn route_of(&self, passenger_id: u32) -> Option<&VehicleRoute> {
        self.routes
            .iter()
            .find(|r| r.per_passenger.contains_key(&passenger_id))
    }
}

fn check_partition_args(n: usize, max_block: usize) -> Result<()> {
    if n > MAX_PARTITION_ELEMENTS {
        return Err(Error::Input(format!(
            "{n} elements exceeds the enumeration cap of {MAX_PARTITION_ELEMENTS}"
        )));
    }
    if max_block == 0 {
        return Err(Error::Input("maximum block size must be at least 1".into()));
    }
    Ok(())
}

/// Number of set partitions of `n` labelled elements into blocks of at most
/// `max_block` elements.
///
/// Uses a(n) = Σ_{k=1..max_block} C(n−1, k−1)·a(n−k): the block holding the
/// first element has k members chosen from the other n−1.
pub fn count_partitions(n: usize, max_block: usize) -> Result<u64> {
    check_partition_args(n, max_block)?;
    let mut binom = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j < i { binom[i - 1][j] } else { 0 };
        }
    }
    let mut a = vec![0u64; n + 1];
    a[0] = 1;
    for m in 1..=n {
        a[m] = (1..=max_block.min(m))
            .map(|k| binom[m - 1][k - 1] * a[m - k])
            .sum();
    }
    Ok(a[n])
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    /// Unplaced elements, leader excluded.
    rest: u32,
    /// Current companions of the leader, a submask of `rest`.
    companions: u32,
    block: u32,
}

/// Allocation-free walk over bounded set partitions, as bitmask blocks.
///
/// Each block is led by the smallest element not yet placed and blocks come
/// in leader order. A leader's companion sets are tried in increasing bitmask
/// order, so the first partition is all singletons.
#[derive(Debug, Clone)]
pub struct PartitionWalker {
    full: u32,
    max_companions: u32,
    frames: Vec<Frame>,
    blocks: Vec<u32>,
    started: bool,
    done: bool,
}

impl PartitionWalker {
    pub fn new(n: usize, max_block: usize) -> Result<Self> {
        check_partition_args(n, max_block)?;
        Ok(Self {
            full: if n == 0 { 0 } else { u32::MAX >> (32 - n) },
            max_companions: (max_block - 1) as u32,
            frames: Vec::with_capacity(n),
            blocks: Vec::with_capacity(n),
            started: false,
            done: false,
        })
    }

    /// Moves to the next partition; false once all have been visited.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            self.descend(self.full);
            return true;
        }
        while let Some(top) = self.frames.last_mut() {
            let mut sub = top.companions;
            loop {
                sub = ((sub | !top.rest).wrapping_add(1)) & top.rest;
                if sub == 0 || sub.count_ones() <= self.max_companions {
                    break;
                }
            }
            if sub != 0 {
                let leader = top.block & !top.companions;
                top.companions = sub;
                top.block = leader | sub;
                let remaining = top.rest & !sub;
                let block = top.block;
                *self.blocks.last_mut().expect("frame has a block") = block;
                self.descend(remaining);
                return true;
            }
            self.frames.pop();
            self.blocks.pop();
        }
        self.done = true;
        false
    }

    /// Blocks of the current partition.
    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    fn descend(&mut self, mut remaining: u32) {
        while remaining != 0 {
            let leader = remaining & remaining.wrapping_neg();
            let rest = remaining & !leader;
            self.frames.push(Frame {
                rest,
                companions: 0,
                block: leader,
            });
            self.blocks.push(leader);
            remaining = rest;
        }
    }
}

/// Iterator over partitions of `0..n` as lists of ascending blocks.
pub struct Partitions {
    walker: PartitionWalker,
}

impl Iterator for Partitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.walker.advance() {
            return None;
        }
        Some(
            self.walker
                .blocks()
                .iter()
                .map(|&mask| mask_members(mask).collect())
                .collect(),
        )
    }
}

/// Every partition of `0..n` into blocks of at most `max_block`, each exactly
/// once, in the canonical order of [`PartitionWalker`].
pub fn enumerate_partitions(n: usize, max_block: usize) -> Result<Partitions> {
    Ok(Partitions {
        walker: PartitionWalker::new(n, max_block)?,
    })
}

fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Shortest open path from `origin` through every stop in the block.
///
/// All `k!` visit orders are tried. Ties go to the lexicographically smallest
/// destination sequence, then the smallest passenger sequence.
pub fn best_route_for_block(
    origin: usize,
    block: &[RideRequest],
    matrix: &DistanceMatrix,
) -> Result<VehicleRoute> {
    if block.is_empty() || block.len() > MAX_CAPACITY {
        return Err(Error::Input(format!(
            "a block holds 1 to {MAX_CAPACITY} passengers, got {}",
            block.len()
        )));
    }
    for r in block {
        matrix.leg(origin, r.destination)?;
    }
    let mut stops = block.to_vec();
    stops.sort_by_key(|r| (r.destination, r.passenger_id));
    let order = best_order(origin, &stops, matrix).ok_or_else(|| Error::Unreachable {
        from: origin,
        node: stops[stops.len() - 1].destination,
    })?;
    let ordered: Vec<RideRequest> = order.iter().map(|&i| stops[i]).collect();
    Ok(build_route(origin, &ordered, matrix))
}

/// Index order into `stops` with the shortest path, or `None` when no order
/// is fully reachable. `stops` must already be in tie-break order.
fn best_order(origin: usize, stops: &[RideRequest], matrix: &DistanceMatrix) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..stops.len()).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let cost = path_length(origin, perm.iter().map(|&i| stops[i].destination), matrix);
        if cost.is_finite() && best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, perm.clone()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.map(|(_, p)| p)
}

fn path_length(origin: usize, stops: impl Iterator<Item = usize>, matrix: &DistanceMatrix) -> f64 {
    let mut at = origin;
    let mut total = 0.0;
    for d in stops {
        total += matrix.dist(at, d);
        at = d;
    }
    total
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p
        .iter()
        .rposition(|&x| x > p[i])
        .expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn build_route(origin: usize, ordered: &[RideRequest], matrix: &DistanceMatrix) -> VehicleRoute {
    let mut legs = Vec::with_capacity(ordered.len());
    let mut per_passenger = BTreeMap::new();
    let (mut at, mut dist, mut time) = (origin, 0.0, 0.0);
    for r in ordered {
        let (d, t) = (
            matrix.dist(at, r.destination),
            matrix.time(at, r.destination),
        );
        legs.push(Leg {
            from: at,
            to: r.destination,
            distance_km: d,
            time_min: t,
        });
        dist += d;
        time += t;
        per_passenger.insert(
            r.passenger_id,
            Drop {
                ride_distance_km: dist,
                ride_time_min: time,
            },
        );
        at = r.destination;
    }
    let mut block: Vec<u32> = ordered.iter().map(|r| r.passenger_id).collect();
    block.sort_unstable();
    VehicleRoute {
        origin,
        block,
        passenger_order: ordered.iter().map(|r| r.passenger_id).collect(),
        visit_order: ordered.iter().map(|r| r.destination).collect(),
        legs,
        total_distance_km: dist,
        total_time_min: time,
        per_passenger,
    }
}

fn validate_requests(
    origin: usize,
    requests: &[RideRequest],
    capacity: usize,
    matrix: &DistanceMatrix,
) -> Result<()> {
    if requests.len() > MAX_PASSENGERS {
        return Err(Error::Input(format!(
            "{} passengers exceeds the cap of {MAX_PASSENGERS}",
            requests.len()
        )));
    }
    if capacity == 0 || capacity > MAX_CAPACITY {
        return Err(Error::Input(format!(
            "capacity must lie in 1..={MAX_CAPACITY}, got {capacity}"
        )));
    }
    if origin >= matrix.len() {
        return Err(Error::Input(format!(
            "origin {origin} is not a network node"
        )));
    }
    let mut seen = HashSet::new();
    for r in requests {
        if !seen.insert(r.passenger_id) {
            return Err(Error::Input(format!(
                "duplicate passenger id {}",
                r.passenger_id
            )));
        }
        if r.destination >= matrix.len() {
            return Err(Error::Input(format!(
                "passenger {} has unknown destination {}",
                r.passenger_id, r.destination
            )));
        }
        matrix.leg(origin, r.destination)?;
    }
    Ok(())
}

/// Distance-optimal assignment over every partition of the requests.
///
/// Ties between partitions keep the first in canonical enumeration order.
pub fn optimal_assignment(
    origin: usize,
    requests: &[RideRequest],
    capacity: usize,
    matrix: &DistanceMatrix,
) -> Result<Assignment> {
    validate_requests(origin, requests, capacity, matrix)?;
    let n = requests.len();

    // Best visit order for every request subset of size ≤ capacity.
    let mut memo: Vec<Option<(f64, Vec<usize>)>> = vec![None; 1 << n];
    let mut memo_entries = 0;
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() as usize > capacity {
            continue;
        }
        let mut members: Vec<usize> = mask_members(mask).collect();
        members.sort_by_key(|&i| (requests[i].destination, requests[i].passenger_id));
        let stops: Vec<RideRequest> = members.iter().map(|&i| requests[i]).collect();
        memo[mask as usize] = Some(match best_order(origin, &stops, matrix) {
            Some(order) => {
                let cost = path_length(origin, order.iter().map(|&i| stops[i].destination), matrix);
                (cost, order.iter().map(|&i| members[i]).collect())
            }
            None => (f64::INFINITY, Vec::new()),
        });
        memo_entries += 1;
    }

    let mut walker = PartitionWalker::new(n, capacity)?;
    let mut visited = 0u64;
    let mut best: Option<(f64, Vec<u32>)> = None;
    while walker.advance() {
        visited += 1;
        let mut total = 0.0;
        for &b in walker.blocks() {
            total += memo[b as usize].as_ref().expect("block within capacity").0;
        }
        if total.is_finite() && best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, walker.blocks().to_vec()));
        }
    }

    let (objective_km, blocks) = match best {
        Some(found) => found,
        None if n == 0 => (0.0, Vec::new()),
        None => {
            return Err(Error::Unreachable {
                from: origin,
                node: requests[n - 1].destination,
            })
        }
    };
    let routes = blocks
        .iter()
        .map(|&b| {
            let (_, order) = memo[b as usize].as_ref().expect("memoized block");
            let ordered: Vec<RideRequest> = order.iter().map(|&i| requests[i]).collect();
            build_route(origin, &ordered, matrix)
        })
        .collect();
    Ok(Assignment {
        routes,
        objective_km,
        stats: SearchStats {
            partitions_visited: visited,
            memo_entries,
        },
    })
}

/// Reads the requests CSV layout (`passenger_id,destination_node`).
pub fn load_requests(source: impl Read) -> Result<Vec<RideRequest>> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(source).deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_requests(requests: &[RideRequest], sink: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in requests {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<requests>", e))
}
