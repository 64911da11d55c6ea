//! Duality approach: the contour-integral solution of the free evolution
//! equation for step initial data, the nested-contour and partition moment
//! formulas, `tau`-Laplace transforms by series and by two Fredholm
//! determinants, and inversion of moments to the distribution of `N_0(t)`.

mod integrand;
mod inversion;
mod laplace;
mod moments;
mod ustep;

pub use integrand::{cross_factor, eps_prime, h, xi_of_z};
pub use inversion::{invert_distribution, InversionOptions, MAX_SUPPORT};
pub use laplace::{
    det_cauchy, det_mellin_barnes, mellin_barnes_kernel, mellin_barnes_radius, mellin_barnes_w_radius, residue_kernel,
    s_truncation, tau_laplace_series, abscissa_range, LaplaceValue, MellinBarnesOptions, MAX_DET_TIME,
};
pub use moments::{
    moment_nested, moment_partition, moment_table_nested, moment_table_partition, MomentOptions, NestedGeometry,
    MAX_NESTED_ORDER, MAX_PARTITION_ORDER,
};
pub use ustep::{small_circle_radius, u_step, UStepOptions, MAX_U_STEP_PARTICLES};
