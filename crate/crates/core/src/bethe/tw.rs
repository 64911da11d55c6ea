use serde::{Deserialize, Serialize};

use super::amplitude::eps_unchecked;
use crate::error::{Error, Result};
use crate::numerics::qseries::{q_pochhammer, Length};
use crate::numerics::{build_contour, fredholm_det, ContourShape, ModelParams};
use crate::C64;

/// Largest `m` accepted by [`tw_distribution`].
pub const MAX_TW_M: usize = 8;
/// Largest time accepted by [`tw_distribution`].
pub const MAX_TW_TIME: f64 = 1.0;
/// Tolerated propagated determinant error.
pub const TW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwOptions {
    /// Radius of `C_R` in units of [`tw_radius_min`].
    pub radius_factor: f64,
    /// Nyström nodes on `C_R`.
    pub det_nodes: usize,
    /// Nodes on the `zeta` circle.
    pub zeta_nodes: usize,
}

impl Default for TwOptions {
    fn default() -> Self {
        Self {
            radius_factor: 1.5,
            det_nodes: 64,
            zeta_nodes: 256,
        }
    }
}

/// Smallest admissible radius of `C_R`: beyond it `q R^2 - R - p > 0`, so
/// `p + q xi xi' - xi` cannot vanish for `xi, xi'` on the circle.
pub fn tw_radius_min(params: &ModelParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    (1.0 + (1.0 + 4.0 * p * q).sqrt()) / (2.0 * q)
}

/// `P(N_0(t) = m)` from
/// `-tau^m / (2 pi i) oint det(I - zeta K_1) / (zeta; tau)_{m+1} dzeta`
/// with `K_1(xi, xi') = q e^{eps(xi) t} / (p + q xi xi' - xi)` on `C_R`.
///
/// The `zeta` circle encloses the poles `tau^{-k}`, `k = 0..=m`.
pub fn tw_distribution(m: usize, t: f64, params: &ModelParams, opts: TwOptions) -> Result<f64> {
    if m > MAX_TW_M {
        return Err(Error::Size(format!("m must be <= {MAX_TW_M}, got {m}")));
    }
    if !(0.0..=MAX_TW_TIME).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "time must lie in [0, {MAX_TW_TIME}] for this route, got {t}"
        )));
    }
    if !(opts.radius_factor > 1.0) {
        return Err(Error::Geometry(format!(
            "C_R must lie outside the minimal radius, got factor {}",
            opts.radius_factor
        )));
    }
    let (p, q, tau) = (params.p(), params.q(), params.tau());
    let r = opts.radius_factor * tw_radius_min(params);
    let c_r = build_contour(
        &ContourShape::Circle {
            center: C64::new(0.0, 0.0),
            radius: r,
        },
        opts.det_nodes,
    )?;
    let far = tau.powi(-(m as i32));
    let spread = far - 1.0;
    let zeta_circle = build_contour(
        &ContourShape::Circle {
            center: C64::new(0.5 * (1.0 + far), 0.0),
            radius: 0.6 * spread + 0.5,
        },
        opts.zeta_nodes,
    )?;
    let kernel = |a: C64, b: C64| q * (eps_unchecked(a, p, q) * t).exp() / (p + q * a * b - a);
    let mut total = C64::new(0.0, 0.0);
    let mut error = 0.0;
    for (&zeta, &w) in zeta_circle.nodes.iter().zip(&zeta_circle.weights) {
        let det = fredholm_det(kernel, &c_r, -zeta)?;
        let factor = w / q_pochhammer(zeta, tau, Length::Finite(m + 1));
        total += factor * det.value;
        error += factor.norm() * det.error;
    }
    let scale = tau.powi(m as i32);
    error *= scale;
    if error > TW_TOLERANCE {
        return Err(Error::convergence("K_1 determinant", error, TW_TOLERANCE));
    }
    Ok(-(scale * total).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_point_mass() {
        let pr = ModelParams::new(0.3).unwrap();
        assert!((tw_distribution(0, 0.0, &pr, TwOptions::default()).unwrap() - 1.0).abs() < 1e-10);
        assert!(tw_distribution(1, 0.0, &pr, TwOptions::default()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rejects_out_of_range() {
        let pr = ModelParams::new(0.3).unwrap();
        assert!(tw_distribution(9, 0.5, &pr, TwOptions::default()).is_err());
        assert!(tw_distribution(1, 1.5, &pr, TwOptions::default()).is_err());
        let bad = TwOptions {
            radius_factor: 0.9,
            ..TwOptions::default()
        };
        assert!(matches!(tw_distribution(1, 0.5, &pr, bad), Err(Error::Geometry(_))));
    }
}
