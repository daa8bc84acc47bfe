//! Base-station deployments as spatial point processes.
//!
//! The crate samples Poisson, Matérn hardcore (type II) and lattice
//! deployments, estimates downlink SINR coverage by Monte Carlo under
//! Rayleigh fading and power-law path loss, and evaluates two quadrature
//! lower bounds on Matérn hardcore coverage (a Jensen bound and a tighter
//! PGFL-style bound), together with the empirical checks that back them.
//!
//! Lengths are in km, densities in points per km², SINR thresholds are
//! linear inside the library; dB only appears at the CLI and CSV boundary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod bounds;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod error;
pub mod io;
pub mod process;
pub mod rng;
mod spatial;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use process::{MhcParams, PointSet, Provenance};
pub use window::{EdgePolicy, Point, Window};
