//! Renders all seventeen explanations for one scenario.
//!
//!     cargo run --example render_explanations -- [shared$ shared_min taxi$ taxi_min bus$ bus_min co2_kg]

use ridex::explanations::{
    enumerate_descriptors, extract_features, render, FeatureVector, Scenario,
};
use ridex::pricing::TripQuote;

fn main() -> ridex::Result<()> {
    let v: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let q = if v.len() == 7 {
        TripQuote {
            shared_cost_usd: v[0],
            shared_time_min: v[1],
            private_cost_usd: v[2],
            private_time_min: v[3],
            public_cost_usd: v[4],
            public_time_min: v[5],
            co2_saved_kg: v[6],
        }
    } else {
        TripQuote {
            shared_cost_usd: 7.53,
            shared_time_min: 13.0,
            private_cost_usd: 13.83,
            private_time_min: 12.0,
            public_cost_usd: 2.50,
            public_time_min: 26.0,
            co2_saved_kg: 0.5,
        }
    };
    let s = Scenario {
        scenario_id: 0,
        quote: q,
    };

    let f = extract_features(&s).to_array();
    for (name, x) in FeatureVector::NAMES.iter().zip(f) {
        println!("{name:>26} = {x:.4}");
    }
    println!();
    for d in enumerate_descriptors() {
        match render(d, &s) {
            Ok(e) => println!(
                "{:>2} {:<22} {} {}",
                e.index,
                d.label(),
                if e.favorable() { "+" } else { "-" },
                e.text
            ),
            Err(err) => println!("{:>2} {:<22} ? {err}", d.index(), d.label()),
        }
    }
    Ok(())
}
