//! Channel-estimation and uplink spectral-efficiency analysis of Massive MIMO
//! networks whose base stations form a homogeneous Poisson point process.
//!
//! The crate has two independent routes to every quantity of interest:
//!
//! * [`analytics`] evaluates the closed forms (interference moments, NMSE
//!   bound, MR/ZF SINR decompositions, spectral efficiency, asymptotic rate and
//!   optimal pilot reuse).
//! * [`simulator`] realizes the network model directly (PPP deployment,
//!   Voronoi-uniform UEs, Bernoulli or explicit pilot sharing, Rayleigh fading)
//!   and estimates the same expectations empirically.
//!
//! [`pathloss`] and [`specfun`] hold the shared building blocks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
mod error;
pub mod pathloss;
pub mod simulator;
pub mod specfun;

pub use analytics::{MuCoefficients, NetworkParams, Scheme, SinrBreakdown};
pub use error::{Error, Result};
pub use pathloss::PathLossModel;

/// Converts a density in BS/km² to BS/m².
pub fn per_km2_to_per_m2(lambda_km2: f64) -> f64 {
    lambda_km2 * 1e-6
}

/// Converts a ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
