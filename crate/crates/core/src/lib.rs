//! Monte Carlo statistical solutions of a Mach 2000 astrophysical jet with a
//! D2Q5 vectorial lattice Boltzmann scheme.
//!
//! The crate is organised bottom-up:
//!
//! - [`euler`]: ideal-gas states, fluxes and wave speeds
//! - [`solver`]: Maxwellians, blended stream-collide update, boundaries and
//!   the per-sample time loop
//! - [`inlet`]: seeded inlet density perturbation and initial fields
//! - [`ensemble`]: sample orchestration, manifests and validity masks
//! - [`metrics`]: restriction, strong error, Wasserstein distance and rates
//! - [`pipeline`]: the `run`, `metrics`, `render` and `rates` commands

// `!(x > 0.0)` is how NaN gets rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod ensemble;
pub mod error;
pub mod euler;
pub mod grid;
pub mod inlet;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod rng;
pub mod snapshot;
pub mod solver;

pub use config::CaseConfig;
pub use error::{Error, Result};
pub use euler::{ConservedState, GasParams, PrimitiveState};
pub use grid::{FieldSnapshot, Grid};
