//! Coordinate Bethe ansatz: the k-particle transition probability, the
//! free-evolution residual checks, and the Fredholm-determinant formula for
//! the current distribution with the `K_1` kernel.
//!
//! The transition probability is that of the original process (right jumps
//! at `p`): for every inversion `i < j`, `sigma(i) > sigma(j)`, the
//! amplitude picks up `S(xi_{sigma(i)}, xi_{sigma(j)})`.

mod amplitude;
mod green;
mod residual;
mod tw;

pub use amplitude::{amplitude, epsilon, scattering};
pub use green::{bethe_solution, bethe_term, green_function, GreenOptions, Radius};
pub use residual::{check_free_evolution, Residuals};
pub use tw::{tw_distribution, tw_radius_min, TwOptions, MAX_TW_M, MAX_TW_TIME, TW_TOLERANCE};
