//! Event-driven simulation of ASEP from step initial data and estimators
//! for the observables the exact formulas predict.
//!
//! Replica `r` of a run draws from a ChaCha8 stream keyed by the run seed
//! with stream number `stream_id + r`, so results do not depend on how
//! replicas are spread over threads.

mod estimate;
mod sim;

pub use estimate::{
    estimate_distribution, estimate_moments, estimate_tau_laplace, moments_from_samples,
    distribution_from_samples, tau_laplace_from_samples, Estimate,
};
pub use sim::{light_cone_margin, sample_currents, simulate_once, simulate_window, CurrentSample, SimConfig};
