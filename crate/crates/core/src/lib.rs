//! Static partitioning of implicit-deadline periodic real-time tasks onto
//! heterogeneous multiprocessors with DVFS.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: the problem instance (utilization matrix, platform, power model)
//!   and seeded instance generation.
//! - [`cost`]: per-processor loads, EDF feasibility, makespan and energy costs.
//! - [`heuristics`]: Min-min and Max-min greedy partitioners.
//! - [`pso`]: discrete-position particle swarm optimization with fixed, linearly
//!   decaying and re-excited inertia, optionally seeded with heuristic solutions.
//! - [`oracle`]: exhaustive enumeration for ground truth on small instances.
//! - [`harness`]: experiment sweeps, result tables and plot series.
//! - [`cli`]: the `hetpart` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cost;
mod error;
pub mod harness;
pub mod heuristics;
pub mod model;
pub mod oracle;
pub mod pso;
pub mod rng;

pub use cost::{Assignment, CostKind, CostSpec, LoadVector, PenaltyMode};
pub use error::{Error, Result};
pub use model::{DvfsMode, Profile, UtilizationMatrix};
pub use pso::{Inertia, RunRecord, SwarmConfig};
