//! Device-failure analysis for data-center fleets.
//!
//! The crate ingests (or synthesizes) failure logs for three device families
//! and turns them into the statistics an operator actually acts on:
//!
//! - **DRAM**: hierarchical component-failure classification of error traces
//!   ([`classify`]), a logistic server-failure model with design comparison
//!   ([`logistic`]), and trace-driven simulation of the two standard
//!   mitigations — page offlining and physical page randomization ([`sim`]).
//! - **SSD**: UBER/BER rates, factor-vs-failure-rate curves, lifecycle phase
//!   labeling, and correlated-failure probabilities ([`ssd`]).
//! - **Network**: incident rates, MTBF/MTTR/MTBI, percentile reliability
//!   curves with exponential fits, and conditional-risk checks ([`net`]).
//!
//! Shared statistical machinery (bucketed failure-rate series with exact
//! binomial confidence intervals, Pareto/power-law/Weibull/exponential fits,
//! skew summaries) lives in [`stats`]. Domain types, file formats, and the
//! deterministic synthetic trace generator live in [`trace`].
//!
//! Everything is deterministic: fits never use randomized initialization, and
//! all sampling flows through seedable, portable RNG substreams so identical
//! inputs produce byte-identical outputs.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` on
// purpose: NaN must fail closed, and the negated form is the one that
// rejects it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod logistic;
pub mod net;
pub mod sim;
pub mod ssd;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};

/// Library version, as recorded in run manifests next to the names of the
/// built-in models it ships.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
