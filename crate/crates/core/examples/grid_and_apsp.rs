//! Builds a jittered grid, solves all-pairs shortest paths and prints a few
//! routes.
//!
//!     cargo run --example grid_and_apsp -- [rows] [cols] [seed]

use std::time::Instant;

use ridex::roadnet::{all_pairs_shortest_paths, generate_grid, DEFAULT_SPEED_KMH};

fn main() -> ridex::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let rows = args.first().copied().unwrap_or(10) as usize;
    let cols = args.get(1).copied().unwrap_or(10) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let network = generate_grid(rows, cols, 0.5, 0.2, seed)?;
    let started = Instant::now();
    let matrix = all_pairs_shortest_paths(&network, DEFAULT_SPEED_KMH)?;
    println!(
        "{} nodes, {} edges; shortest paths in {:.1?}",
        network.node_count(),
        network.edges().len(),
        started.elapsed()
    );

    let far = network.node_count() - 1;
    for target in [cols - 1, far / 2, far] {
        let path = matrix.path(0, target).expect("grid is connected");
        println!(
            "0 -> {target}: {:.3} km, {:.1} min, {} hops via {:?}",
            matrix.dist(0, target),
            matrix.time(0, target),
            path.len() - 1,
            path
        );
    }

    let diameter = (0..matrix.len())
        .flat_map(|i| (0..matrix.len()).map(move |j| (i, j)))
        .map(|(i, j)| matrix.dist(i, j))
        .fold(0.0, f64::max);
    println!("network diameter {diameter:.3} km");
    Ok(())
}
