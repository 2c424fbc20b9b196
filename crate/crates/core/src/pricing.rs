//! Fares for the shared ride and its two alternatives.
//!
//! Fare and transit constants are synthetic and live in [`FareConfig`]. The
//! shared fare charges one base fare for the whole route; passengers then pay
//! in proportion to what their own private taxi would have cost.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assignment::VehicleRoute;
use crate::error::{Error, Result};
use crate::roadnet::DistanceMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FareConfig {
    pub base_usd: f64,
    pub per_km_usd: f64,
    pub per_min_usd: f64,
    pub bus_fare_usd: f64,
    pub transit_time_factor: f64,
    pub transit_wait_min: f64,
    pub km_per_bus: f64,
    pub max_buses: u32,
    pub co2_kg_per_km: f64,
    pub speed_kmh: f64,
}

impl Default for FareConfig {
    fn default() -> Self {
        Self {
            base_usd: 2.50,
            per_km_usd: 1.56,
            per_min_usd: 0.35,
            bus_fare_usd: 2.50,
            transit_time_factor: 1.6,
            transit_wait_min: 8.0,
            km_per_bus: 5.0,
            max_buses: 3,
            co2_kg_per_km: 0.192,
            speed_kmh: 30.0,
        }
    }
}

impl FareConfig {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("base_usd", self.base_usd),
            ("per_km_usd", self.per_km_usd),
            ("per_min_usd", self.per_min_usd),
            ("bus_fare_usd", self.bus_fare_usd),
            ("transit_wait_min", self.transit_wait_min),
            ("co2_kg_per_km", self.co2_kg_per_km),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        if !(self.transit_time_factor >= 1.0 && self.transit_time_factor.is_finite()) {
            return Err(Error::Config(format!(
                "transit_time_factor must be ≥ 1, got {}",
                self.transit_time_factor
            )));
        }
        for (name, v) in [
            ("km_per_bus", self.km_per_bus),
            ("speed_kmh", self.speed_kmh),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.max_buses == 0 {
            return Err(Error::Config("max_buses must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; missing keys take their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Distance and time component of a taxi fare, base excluded.
    fn metered(&self, distance_km: f64, time_min: f64) -> f64 {
        self.per_km_usd * distance_km + self.per_min_usd * time_min
    }
}

/// Everything a passenger is told about one shared ride and its
/// alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripQuote {
    pub shared_cost_usd: f64,
    pub shared_time_min: f64,
    pub private_cost_usd: f64,
    pub private_time_min: f64,
    pub public_cost_usd: f64,
    pub public_time_min: f64,
    pub co2_saved_kg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivateQuote {
    pub cost_usd: f64,
    pub time_min: f64,
    pub distance_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublicQuote {
    pub cost_usd: f64,
    pub time_min: f64,
    pub num_buses: u32,
}

/// Private taxi: base + per-km·distance + per-minute·time.
pub fn private_quote(
    origin: usize,
    dest: usize,
    matrix: &DistanceMatrix,
    cfg: &FareConfig,
) -> Result<PrivateQuote> {
    let (distance_km, time_min) = matrix.leg(origin, dest)?;
    Ok(PrivateQuote {
        cost_usd: cfg.base_usd + cfg.metered(distance_km, time_min),
        time_min,
        distance_km,
    })
}

/// Public transit: one bus per started `km_per_bus` (capped at `max_buses`),
/// each at the flat bus fare, on a slowed-down driving time plus a wait.
pub fn public_quote(
    origin: usize,
    dest: usize,
    matrix: &DistanceMatrix,
    cfg: &FareConfig,
) -> Result<PublicQuote> {
    let (distance_km, time_min) = matrix.leg(origin, dest)?;
    let buses = 1 + (distance_km / cfg.km_per_bus).floor() as u64;
    let num_buses = buses.min(u64::from(cfg.max_buses)) as u32;
    Ok(PublicQuote {
        cost_usd: f64::from(num_buses) * cfg.bus_fare_usd,
        time_min: cfg.transit_time_factor * time_min + cfg.transit_wait_min,
        num_buses,
    })
}

/// Total fare of a shared route: one base fare plus the metered price of
/// every leg.
pub fn shared_total_cost(route: &VehicleRoute, cfg: &FareConfig) -> f64 {
    let metered: f64 = route
        .legs
        .iter()
        .map(|leg| cfg.metered(leg.distance_km, leg.time_min))
        .sum();
    cfg.base_usd + metered
}

/// Splits `total_shared_usd` in proportion to each passenger's private cost.
pub fn split_proportional(total_shared_usd: f64, private_costs: &[f64]) -> Result<Vec<f64>> {
    if private_costs.is_empty() {
        return Err(Error::Input("no private costs to split over".into()));
    }
    if let Some(bad) = private_costs.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::Input(format!(
            "private cost must be positive, got {bad}"
        )));
    }
    if !(total_shared_usd >= 0.0 && total_shared_usd.is_finite()) {
        return Err(Error::Input(format!(
            "shared total must be ≥ 0, got {total_shared_usd}"
        )));
    }
    let f = total_shared_usd / private_costs.iter().sum::<f64>();
    Ok(private_costs.iter().map(|c| f * c).collect())
}

/// CO2 each passenger avoids compared with riding alone.
///
/// The route's emissions are allocated like the cost split: each passenger
/// carries the share `g = route km / Σ private km` of their private distance.
pub fn co2_saved(
    route: &VehicleRoute,
    private_distances: &BTreeMap<u32, f64>,
    cfg: &FareConfig,
) -> BTreeMap<u32, f64> {
    let private_total: f64 = private_distances.values().sum();
    if private_total <= 0.0 {
        return private_distances.keys().map(|&p| (p, 0.0)).collect();
    }
    let g = route.total_distance_km / private_total;
    private_distances
        .iter()
        .map(|(&p, &d)| (p, (cfg.co2_kg_per_km * (d - g * d)).max(0.0)))
        .collect()
}

/// Quotes for every passenger in a route, keyed by passenger id.
pub fn quote_route(
    route: &VehicleRoute,
    matrix: &DistanceMatrix,
    cfg: &FareConfig,
) -> Result<BTreeMap<u32, TripQuote>> {
    let mut privates = BTreeMap::new();
    let mut publics = BTreeMap::new();
    for (&pid, &dest) in route.passenger_order.iter().zip(&route.visit_order) {
        privates.insert(pid, private_quote(route.origin, dest, matrix, cfg)?);
        publics.insert(pid, public_quote(route.origin, dest, matrix, cfg)?);
    }
    let ids: Vec<u32> = privates.keys().copied().collect();
    let costs: Vec<f64> = privates.values().map(|q| q.cost_usd).collect();
    let payments = split_proportional(shared_total_cost(route, cfg), &costs)?;
    let distances = privates.iter().map(|(&p, q)| (p, q.distance_km)).collect();
    let co2 = co2_saved(route, &distances, cfg);

    Ok(ids
        .iter()
        .zip(payments)
        .map(|(pid, pay)| {
            let private = privates[pid];
            let public = publics[pid];
            (
                *pid,
                TripQuote {
                    shared_cost_usd: pay,
                    shared_time_min: route.per_passenger[pid].ride_time_min,
                    private_cost_usd: private.cost_usd,
                    private_time_min: private.time_min,
                    public_cost_usd: public.cost_usd,
                    public_time_min: public.time_min,
                    co2_saved_kg: co2[pid],
                },
            )
        })
        .collect())
}
