//! Closed-form quantities behind the overlap-gap arguments, evaluated
//! numerically: entropy, moment exponents, parameter schedules, the
//! stability planner, covariance spectra, binomial and Ramsey bounds.
//!
//! Doubly exponential quantities are only ever carried as log₂ or
//! log₂log₂ values.

pub mod combinatorics;
pub mod entropy;
pub mod fit;
pub mod linalg;
pub mod ogp;
pub mod planner;

pub use combinatorics::{log2_binomial, ramsey_upper, RamseyBound};
pub use entropy::{binary_entropy, entropy_inverse};
pub use linalg::{build_covariance, build_covariance_scaled, min_eigenvalue, symmetric_eigenvalues, Matrix};
pub use ogp::{first_moment_exponent, main_slack, superconstant_schedule, two_ogp_rho, OgpParameters};
pub use fit::{least_squares, LinearFit};
pub use planner::{plan_theorem_main, psi, psi_min_direct, PlanReport, C1, C2};
