//! Snaps a trip file's drop-offs to a network and solves the assignment
//! for the first batch of riders.
//!
//!     cargo run --example ingest_trips -- [trips.csv]

use ridex::assignment::{optimal_assignment, MAX_PASSENGERS};
use ridex::harness::{ingest_trips, DEFAULT_SNAP_CUTOFF_KM};
use ridex::roadnet::{all_pairs_shortest_paths, generate_grid};

const SAMPLE: &str = "pickup_x_km,pickup_y_km,dropoff_x_km,dropoff_y_km
0,0,1.2,3.9
0,0,4.4,4.1
0,0,2.0,0.6
0,0,9.0,9.5
0,0,31.0,2.0
0,0,3.1,3.3
";

fn main() -> ridex::Result<()> {
    let network = generate_grid(10, 10, 0.5, 0.2, 2)?;
    let report = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).map_err(|e| ridex::Error::io(&path, e))?;
            ingest_trips(file, &network, DEFAULT_SNAP_CUTOFF_KM)?
        }
        None => ingest_trips(SAMPLE.as_bytes(), &network, DEFAULT_SNAP_CUTOFF_KM)?,
    };
    println!(
        "{} trips snapped, {} beyond {DEFAULT_SNAP_CUTOFF_KM} km skipped",
        report.requests.len(),
        report.skipped
    );
    for r in &report.requests {
        let node = network.nodes()[r.destination];
        println!(
            "  rider {} -> node {} at ({:.2}, {:.2})",
            r.passenger_id, r.destination, node.x_km, node.y_km
        );
    }

    let batch = &report.requests[..report.requests.len().min(MAX_PASSENGERS)];
    let matrix = all_pairs_shortest_paths(&network, 30.0)?;
    let a = optimal_assignment(0, batch, 4, &matrix)?;
    for route in &a.routes {
        println!(
            "  vehicle: riders {:?}, {:.2} km",
            route.passenger_order, route.total_distance_km
        );
    }
    Ok(())
}
