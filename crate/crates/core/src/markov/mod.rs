//! Exact finite-state machinery: state spaces, sparse generators,
//! uniformization, duality functionals and small-system oracles.

mod duality;
mod evolve;
mod generator;
mod oracle;
mod state;

pub use duality::{check_duality, duality_functional, DualityVariant};
pub use evolve::{evolve, Evolution, POISSON_TAIL};
pub use generator::{build_generator, Direction, GeneratorSpec, JumpRates, RateMatrix, STATE_BUDGET};
pub use oracle::{free_walk_probability, poisson_margin, StepOracle};
pub use state::{OccupationState, ParticleConfig, StateSpace};
