//! Simulation and analysis toolkit for adaptive group testing.
//!
//! - [`bounds`]: closed-form log-binomials, converse bounds, test-count
//!   guarantees and channel capacities.
//! - [`model`]: pools, outcomes, noise channels and the metering oracle.
//! - [`algorithms`]: binary search, repeated binary testing, generalized
//!   binary splitting, the round-based variant, erasure retry and COMP.
//! - [`harness`]: reproducible Monte Carlo trials, success curves and
//!   capacity scans.

pub mod algorithms;
pub mod bounds;
mod error;
pub mod harness;
pub mod model;

pub use error::{Error, Result};
