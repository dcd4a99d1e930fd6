//! Seeded agent-based simulation of a two-group arrest and recidivism system
//! in which cops follow a cumulative stigma field.
//!
//! The crate is organised around the pipeline a study runs through:
//!
//! - [`sim`]: the grid world, civilians, cops and the per-tick dynamics that
//!   produce arrest events.
//! - [`justice`]: adjudication of each arrest by a pluggable classifier plus the
//!   true-recidivism draw.
//! - [`metrics`]: contingency tables and the arrest-conditioned and population
//!   fairness quantities built from them.
//! - [`experiments`]: replicate sweeps over `(theta, q0)` interventions and their
//!   summaries.
//! - [`bandit`]: epsilon-greedy search over `theta` using the fairness indicator
//!   as reward.
//! - [`cli`]: the `simulate | sweep | bandit` front end and its manifests.
//!
//! Every run is a pure function of its configuration and seed.

pub mod bandit;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod justice;
pub mod metrics;
pub mod output;
pub mod seed;
pub mod sim;

pub use error::{ConfigError, Error, Result};
pub use justice::{ArrestEvent, ClassifierSpec};
pub use metrics::{GroupTable, MetricsReport, Variant};
pub use sim::{run_sim, Group, SimConfig, SimRun, SimState};
