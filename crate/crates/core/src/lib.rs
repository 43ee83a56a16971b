//! Numerical laboratory for a hydrophobic homopolymer pinned at an oil/water
//! interface by random rewards.
//!
//! The model perturbs the simple symmetric random walk by the energy
//! `β Σ (1 + s ζ_i) 1{S_i = 0} − 2h Σ Δ_i`, where `ζ` is an i.i.d. centered
//! disorder field, `h ≥ 0` penalizes time spent below the interface and
//! `Δ_i` marks sites carried below it. The crate provides
//!
//! - exact finite-size partition functions by renewal dynamic programming
//!   ([`renewal`]) and by a height-resolved transfer recursion ([`path_dp`]),
//!   two independent computations of the same quantity;
//! - closed forms and root finders for the non-disordered free energy and the
//!   analytic critical curves and bounds ([`homogeneous`]);
//! - the tilted excursion measures, their environment-dependent modification,
//!   paired Monte Carlo / closed-form estimators for the energy and entropy
//!   terms of the localization lower bound, and the stochastic-dominance
//!   coupling that orders contact counts pathwise ([`tilt`]);
//! - the first-return law of the simple random walk and sign-averaged
//!   excursion weights ([`walk`]), plus seeded disorder generation
//!   ([`disorder`]).
//!
//! Everything is deterministic given the seeds: all samplers take explicit
//! generators, replica seeds derive from `(seed, replica)` and results do not
//! depend on thread counts. The crate is `no_std` (with `alloc`); IO, file
//! formats and the command-line front end live in the companion `pinlab`
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bisect;
pub mod disorder;
pub mod error;
pub mod homogeneous;
pub mod math;
pub mod params;
pub mod path_dp;
pub mod renewal;
pub mod stats;
pub mod tilt;
pub mod walk;

pub use disorder::{DisorderField, DisorderSpec};
pub use error::Error;
pub use homogeneous::{CurvePoint, PinningBounds};
pub use params::ModelParams;
pub use renewal::{FreeEnergyEstimate, PartitionMode, PartitionTrace};
pub use stats::Estimate;
pub use tilt::{BoundLedger, TiltConstants, TiltedLaw};
pub use walk::WalkKernel;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
