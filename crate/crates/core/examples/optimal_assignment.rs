//! Assigns twelve passengers to four-seat vehicles by exhaustive search over
//! every bounded partition.
//!
//!     cargo run --release --example optimal_assignment -- [passengers] [seed]

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ridex::assignment::{count_partitions, optimal_assignment, RideRequest, DEFAULT_CAPACITY};
use ridex::roadnet::{all_pairs_shortest_paths, generate_grid};

fn main() -> ridex::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(12) as usize;
    let seed = args.get(1).copied().unwrap_or(3);

    let network = generate_grid(10, 10, 0.5, 0.2, seed)?;
    let matrix = all_pairs_shortest_paths(&network, 30.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = 0;
    let requests: Vec<RideRequest> = (0..n as u32)
        .map(|passenger_id| RideRequest {
            passenger_id,
            destination: rng.gen_range(1..network.node_count()),
        })
        .collect();

    println!(
        "{n} passengers, {} candidate partitions",
        count_partitions(n, DEFAULT_CAPACITY)?
    );
    let started = Instant::now();
    let a = optimal_assignment(origin, &requests, DEFAULT_CAPACITY, &matrix)?;
    println!(
        "searched {} partitions with {} memoized blocks in {:.2?}",
        a.stats.partitions_visited,
        a.stats.memo_entries,
        started.elapsed()
    );

    let solo: f64 = requests
        .iter()
        .map(|r| matrix.dist(origin, r.destination))
        .sum();
    println!(
        "total {:.3} km for {} vehicles (riding alone: {solo:.3} km)",
        a.objective_km,
        a.routes.len()
    );
    for route in &a.routes {
        println!(
            "  passengers {:?} drop-off order {:?} stops {:?}: {:.3} km, {:.1} min",
            route.block,
            route.passenger_order,
            route.visit_order,
            route.total_distance_km,
            route.total_time_min
        );
    }
    Ok(())
}
