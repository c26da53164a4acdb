//! Ruin probabilities for renewal risk models whose inter-arrival times are
//! sums of gamma and Mittag-Leffler variables and whose claims are sums of
//! gamma variables.
//!
//! * [`specialfn`]: Mittag-Leffler functions and distributions.
//! * [`fraccalc`]: numerical fractional derivatives and operator checks.
//! * [`model`]: model definition, densities and samplers.
//! * [`solver`]: characteristic roots, ruin-probability coefficients, u₅.
//! * [`montecarlo`]: simulation estimates and integral-equation residuals.

pub mod fraccalc;
pub mod model;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod specialfn;
