//! Operational-risk capital analytics.
//!
//! This crate computes operational-risk regulatory capital two ways — the
//! Basel Standardised Measurement Approach (SMA) formula and internal
//! loss-distribution (LDA) models — and ships the machinery to compare them:
//! compound-loss simulation, Panjer recursion, FFT convolution, single-loss
//! approximation, severity fitting with goodness-of-fit statistics, and the
//! scripted studies that probe SMA capital stability, tail sensitivity, and
//! superadditivity.
//!
//! Start with the runnable programs under `examples/`; each one exercises a
//! major capability end to end. The `oprisk` binary exposes the same
//! surface for batch use.

pub mod calibration;
pub mod cli;
pub mod distributions;
pub mod experiments;
pub mod ingest;
pub mod lda;
pub mod rng;
pub mod sma;
pub mod special;

pub use distributions::{DistributionError, FrequencySpec, SeveritySpec};
pub use rng::RngStream;

/// Base currency units per million, for converting event amounts to the
/// millions used by the capital formulas.
pub const UM_PER_MILLION: f64 = 1e6;

/// Seed used when none is supplied on the command line or via `OPRISK_SEED`.
pub const DEFAULT_SEED: u64 = 20160303;
