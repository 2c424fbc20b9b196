//! Prices one shared route: the metered total, each rider's proportional
//! share, and what a taxi or the bus would have cost them.
//!
//!     cargo run --example pricing_split

use ridex::assignment::{optimal_assignment, RideRequest};
use ridex::pricing::{quote_route, shared_total_cost, FareConfig};
use ridex::roadnet::{all_pairs_shortest_paths, generate_grid};

fn main() -> ridex::Result<()> {
    let fares = FareConfig::default();
    let network = generate_grid(8, 8, 0.5, 0.15, 21)?;
    let matrix = all_pairs_shortest_paths(&network, fares.speed_kmh)?;
    let requests: Vec<RideRequest> = [(1, 27), (2, 30), (3, 63), (4, 45)]
        .into_iter()
        .map(|(passenger_id, destination)| RideRequest {
            passenger_id,
            destination,
        })
        .collect();
    let assignment = optimal_assignment(0, &requests, 4, &matrix)?;

    for route in &assignment.routes {
        let quotes = quote_route(route, &matrix, &fares)?;
        let paid: f64 = quotes.values().map(|q| q.shared_cost_usd).sum();
        println!(
            "route {:?}: {:.2} km, fare ${:.2}, collected ${paid:.2}",
            route.passenger_order,
            route.total_distance_km,
            shared_total_cost(route, &fares)
        );
        println!("  rider   shared($, min)   taxi($, min)     bus($, min)   CO2 saved");
        for (pid, q) in &quotes {
            println!(
                "  {pid:>5}   {:>6.2} {:>6.1}   {:>6.2} {:>6.1}   {:>5.2} {:>6.1}   {:.3} kg",
                q.shared_cost_usd,
                q.shared_time_min,
                q.private_cost_usd,
                q.private_time_min,
                q.public_cost_usd,
                q.public_time_min,
                q.co2_saved_kg
            );
        }
    }
    Ok(())
}
