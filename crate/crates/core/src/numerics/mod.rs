//! Shared numerical substrate: model parameters, `q`-series, integer
//! partitions, contour quadrature, Fredholm determinants and Vandermonde
//! solves.

pub mod contour;
pub mod fredholm;
pub mod gauss;
pub mod linalg;
pub mod params;
pub mod partitions;
pub mod qseries;
pub mod sum;
pub mod tensor;
pub mod vandermonde;

pub use contour::{build_contour, Contour, ContourShape};
pub use fredholm::{fredholm_det, FredholmValue};
pub use params::ModelParams;
pub use partitions::{enumerate_partitions, Partition};
pub use qseries::{q_pochhammer, tau_factorial, Length};
pub use tensor::{permutations, tensor_sum};
pub use vandermonde::{vandermonde_moment_solve, vandermonde_solve};
