//! Random number partitioning laboratory.
//!
//! Instances of n i.i.d. standard normal weights, exact and heuristic
//! partition solvers, exhaustive landscape enumeration (near ground states,
//! overlap bands, local optima), exact Gibbs measures with Metropolis
//! dynamics, and numeric evaluators for the overlap-gap parameter schedules.
//!
//! All randomness is derived from explicit 64-bit seeds through
//! [`rng::seed_stream`], so every experiment is reproducible independently of
//! thread count.

pub mod analysis;
pub mod error;
pub mod gibbs_mcmc;
pub mod instances;
pub mod landscape;
pub mod rng;
mod serde_util;
pub mod solvers;
pub mod spin;

pub use error::{NppError, Result};
pub use instances::{CorrelatedEnsemble, Instance, Mode};
pub use solvers::EnergyRecord;
pub use spin::SpinConfig;
