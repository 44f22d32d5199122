//! Slot-based simulator and optimizer for energy-efficient, exposure-aware
//! computation offloading at the wireless edge.
//!
//! A set of devices continuously admits data into local uplink queues,
//! transmits it to an access point co-located with an edge host, and the
//! host computes the offloaded bits. An online drift-plus-penalty policy
//! maximizes the admitted sum-rate while keeping all physical queues stable
//! and honoring long-term device power, edge-host power and per-pixel
//! incident-power-density constraints through virtual queues.
//!
//! Modules:
//! - [`config`]: scenario parameters, validation, TOML boundary;
//! - [`units`]: SI conversions and constants;
//! - [`channel`]: path loss, fading, Shannon maps, power density;
//! - [`queues`]: physical and virtual queue dynamics;
//! - [`solvers`]: the three per-slot subproblem solvers and their
//!   brute-force oracles;
//! - [`engine`]: slot loop, realizations, V sweeps;
//! - [`metrics`]: long-term averages and trade-off aggregation.

pub mod channel;
pub mod config;
pub mod engine;
pub mod metrics;
pub mod queues;
pub mod solvers;
pub mod units;

pub use config::{ConstraintMode, SimConfig};
pub use engine::{run_simulation, run_sweep, RunResult, Simulation};
