//! Exact finite-time formulas, oracles and simulation for the asymmetric
//! simple exclusion process (ASEP) started from step initial data.
//!
//! The crate evaluates the current distribution `P(N_0(t) = m)` along several
//! independent routes and cross-checks them:
//!
//! * [`markov`]: exact finite-state generators and matrix exponentials by
//!   uniformization, duality functionals and a duality verifier.
//! * [`montecarlo`]: event-driven simulation of the infinite system.
//! * [`bethe`]: the coordinate Bethe-ansatz Green's function and the
//!   Fredholm-determinant formula with the `K_1` kernel.
//! * [`duality`]: nested-contour and partition-expansion moment formulas,
//!   `tau`-Laplace transforms and their Fredholm determinants, and moment
//!   inversion.
//! * [`bose`]: the delta Bose gas moment formula.
//! * [`airy`]: the Airy function, `F_GUE` and finite-`t` KPZ scaling
//!   comparisons.
//!
//! Shared numerical machinery lives in [`numerics`].

pub mod airy;
pub mod bethe;
pub mod bose;
pub mod duality;
pub mod error;
pub mod markov;
pub mod montecarlo;
pub mod numerics;
pub mod tables;

pub use error::{Error, Result};
pub use numerics::params::ModelParams;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
