//! Collaborative wireless broadcast in a random disk: reception models,
//! broadcast algorithms, radius schedules, and an interval-arithmetic prover
//! for the geometric inequalities behind the MIMO analysis.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! experiment harness live in the `wavecast` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod broadcast;
mod error;
pub mod geometry;
pub mod interval_prover;
pub mod nodefield;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use geometry::Point2;
pub use nodefield::NodeField;
pub use signal::{SenderSet, SignalParams};

/// Default `c1` of the MIMO schedule, as produced by the `calibrate-c1` routine.
pub const CALIBRATED_C1: f64 = 0.25;
