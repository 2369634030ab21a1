//! Crash-rate modeling pipeline for arterial road sections.
//!
//! The crate covers the whole path from section-level crash records to a
//! lane-width effect report:
//!
//! - [`data`]: record schema, CSV ingestion, across-year aggregation, the
//!   exposure-normalized crash rate, datasets and a synthetic generator.
//! - [`cart`]: squared-error regression trees.
//! - [`ensemble`]: random forests, least-squares boosting, variable
//!   importance and error-vs-size curves.
//! - [`metrics`]: MAE, MSE, histogram intersection and model selection.
//! - [`stats`]: Kruskal-Wallis, Nemenyi post-hoc comparisons and the
//!   distribution functions behind them.
//! - [`counterfactual`]: lane-width what-if simulation.
//! - [`pipeline`]: run configuration and the `generate` / `run` commands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cart;
pub mod counterfactual;
pub mod data;
pub mod ensemble;
mod error;
mod io;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod stats;

pub use error::{Error, Result};

/// Version tag embedded in every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
