//! Shared-ride explanation laboratory.
//!
//! The crate covers the whole path from a road network to the explanations a
//! ridesharing service shows its passengers:
//!
//! - [`roadnet`]: road graphs, a jittered-grid generator and all-pairs
//!   shortest paths.
//! - [`assignment`]: exact, distance-optimal grouping of passengers leaving a
//!   common origin into capacity-bounded vehicles.
//! - [`pricing`]: taxi, shared-ride and transit quotes, proportional cost
//!   sharing and CO2 savings.
//! - [`explanations`]: the 17-explanation taxonomy, values, fixed-template
//!   rendering and the 7-feature vector.
//! - [`agents`]: the full-disclosure, random and learned explanation
//!   selectors.
//! - [`mlp`]: the small logistic network behind the learned selector.
//! - [`game`]: the disclosure signaling game and its equilibrium.
//! - [`harness`]: scenario generation, trip ingestion and agent comparison.

pub mod agents;
pub mod assignment;
pub mod error;
pub mod explanations;
pub mod game;
pub mod harness;
pub mod mlp;
pub mod pricing;
pub mod roadnet;
pub(crate) mod seed;

pub use error::{Error, Result};
