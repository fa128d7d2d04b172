//! Generalized XY lattice spin models and their square-ditch (annealed
//! site-diluted plane rotator) reduction.
//!
//! The crate is split along the lines of the workflow:
//!
//! * [`lattice`]: periodic hypercubic geometry and small hand-built graphs.
//! * [`model`]: Hamiltonians, the Haar single-site measure, observables.
//! * [`montecarlo`]: Metropolis, embedded-rotor cluster moves, replica
//!   exchange, checkpointed runs.
//! * [`analysis`]: error bars, histograms and transition-order verdicts.
//! * [`meanfield`] and [`tsc`]: variational solvers for the d = 3 transition.
//! * [`bounds`]: numerical checks of the partition-function inequalities of
//!   the square-ditch model on small tori.

pub mod analysis;
pub mod bounds;
mod error;
pub mod lattice;
pub mod meanfield;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod special;
pub mod tsc;
pub mod variational;

pub use error::{Error, Result};
pub use lattice::LatticeGeometry;
pub use model::{ModelSpec, ObservableSample, SpinConfiguration, Variant};
pub use variational::{OrderType, TransitionReport};

/// Crate version, embedded in every artifact header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
