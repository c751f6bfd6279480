//! Coupled load/power computation for LTE-like downlink networks.
//!
//! Each base station's load (the fraction of its resource blocks in use)
//! depends on the interference from every other station, which in turn
//! depends on their loads and transmit powers. This crate evaluates that
//! coupling in both directions as fixed points of standard interference
//! mappings:
//!
//! - [`solver::solve_load`] computes the load induced by a given per-RB
//!   power assignment;
//! - [`solver::solve_power`] computes the power assignment inducing a given
//!   load profile, using a closed-form interference mapping, so no nested
//!   bisection is needed;
//! - [`solver::plan_power_for_load_increase`] recomputes powers for a load
//!   increase with two monotone iterate sequences bracketing the answer,
//!   yielding a certified error bound at every iteration.
//!
//! [`oracle`] carries independent scalar reference solutions used by the
//! test suites, and [`scenario`] provides deterministic random scenario
//! generation plus exact-round-trip file I/O. The `loadpower` binary wraps
//! everything behind a small CLI.

pub mod cli;
pub mod mappings;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod solver;

pub use model::{LoadVector, NetworkModel, PowerVector};
