use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::integrand::{cross_factor, h_unchecked};
use crate::error::{Error, Result};
use crate::numerics::{tensor_sum, ModelParams};
use crate::C64;

/// Largest particle count for [`u_step`].
pub const MAX_U_STEP_PARTICLES: usize = 5;
/// Tolerated imaginary part.
pub const U_STEP_TOLERANCE: f64 = 1e-9;
/// Tolerated disagreement with the half-resolution value.
pub const U_STEP_DRIFT: f64 = 1e-7;

/// Radius of the small circle about `-tau` shared by [`u_step`] and
/// `det_cauchy`: it contains `-tau` and excludes `0`, `-1` and `tau`
/// times itself.
pub fn small_circle_radius(tau: f64) -> f64 {
    (1.0 - tau).min(tau) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UStepOptions {
    /// Trapezoid nodes per variable (a power of two).
    pub nodes: usize,
}

impl Default for UStepOptions {
    fn default() -> Self {
        Self { nodes: 64 }
    }
}

/// `E[prod_j tau^{N_{x_j - 1}(t)} eta_{x_j}(t)]` for step initial data,
/// from its k-fold contour integral solution.
///
/// Any `x` in `Z^k` is accepted: the integral solves the free evolution
/// equation with the two-particle boundary condition everywhere, which is
/// what the residual checks probe. It equals the expectation above for
/// strictly increasing `x`, and vanishes at `t = 0` when `x_1 <= 0`.
pub fn u_step(x: &[i64], t: f64, params: &ModelParams, opts: UStepOptions) -> Result<f64> {
    let k = x.len();
    if k == 0 || k > MAX_U_STEP_PARTICLES {
        return Err(Error::Size(format!("need 1..={MAX_U_STEP_PARTICLES} coordinates, got {k}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if opts.nodes < 16 || !opts.nodes.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "node count must be a power of two >= 16, got {}",
            opts.nodes
        )));
    }
    let fine = integral(x, t, params, opts.nodes);
    let coarse = integral(x, t, params, opts.nodes / 2);
    let scale = fine.norm().max(1.0);
    let drift = (fine - coarse).norm();
    if drift > U_STEP_DRIFT * scale {
        return Err(Error::convergence("u_step node doubling", drift, U_STEP_DRIFT * scale));
    }
    if fine.im.abs() > U_STEP_TOLERANCE * scale {
        return Err(Error::convergence("u_step imaginary part", fine.im.abs(), U_STEP_TOLERANCE * scale));
    }
    Ok(fine.re)
}

fn integral(x: &[i64], t: f64, params: &ModelParams, n: usize) -> C64 {
    let (p, q, tau) = (params.p(), params.q(), params.tau());
    let k = x.len();
    let r = small_circle_radius(tau);
    let z: Vec<C64> = (0..n)
        .map(|m| -tau + C64::from_polar(r, 2.0 * PI * m as f64 / n as f64))
        .collect();
    // per variable: h times the trapezoid weight (z + tau) / n
    let factors: Vec<Vec<C64>> = x
        .iter()
        .map(|&xj| z.iter().map(|&zj| (zj + tau) / n as f64 * h_unchecked(xj, t, zj, p, q)).collect())
        .collect();
    let sum = tensor_sum(&vec![n; k], |idx| {
        let mut v = C64::new(1.0, 0.0);
        for (j, f) in factors.iter().enumerate() {
            v *= f[idx[j]];
        }
        for a in 0..k {
            for b in a + 1..k {
                v *= cross_factor(z[idx[a]], z[idx[b]], tau);
            }
        }
        v
    });
    sum * tau.powi((k * (k - 1) / 2) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::check_free_evolution;
    use crate::markov::{duality_functional, Direction, DualityVariant, JumpRates, ParticleConfig, StepOracle};

    #[test]
    fn initial_data() {
        let pr = ModelParams::new(0.3).unwrap();
        let tau = pr.tau();
        let o = UStepOptions::default();
        for x in [vec![1i64], vec![3], vec![1, 2], vec![2, 5], vec![1, 3, 4]] {
            let expect: f64 = x.iter().map(|&xi| tau.powi((xi - 1) as i32)).product();
            let v = u_step(&x, 0.0, &pr, o).unwrap();
            assert!((v - expect).abs() < 1e-12, "{x:?}: {v} vs {expect}");
        }
        assert!(u_step(&[0], 0.0, &pr, o).unwrap().abs() < 1e-12);
        assert!(u_step(&[-1, 2], 0.0, &pr, o).unwrap().abs() < 1e-12);
    }

    #[test]
    fn matches_exact_expectation() {
        let pr = ModelParams::new(0.3).unwrap();
        let tau = pr.tau();
        let t = 0.3;
        let oracle = StepOracle::new(&pr, t, 8, 10).unwrap();
        for x in [vec![1i64], vec![2], vec![1, 2], vec![1, 3], vec![2, 4]] {
            let cfg = ParticleConfig::new(x.clone()).unwrap();
            let exact = oracle.expectation(|eta| duality_functional(eta, &cfg, DualityVariant::Schutz, tau).unwrap());
            let v = u_step(&x, t, &pr, UStepOptions::default()).unwrap();
            assert!((v - exact).abs() < 1e-8, "{x:?}: {v} vs {exact}");
        }
    }

    #[test]
    fn satisfies_free_evolution_and_boundary() {
        let pr = ModelParams::new(0.3).unwrap();
        let rates = JumpRates::of(&pr, Direction::Adjoint);
        let v = |x: &[i64], t: f64| u_step(x, t, &pr, UStepOptions::default());
        for x in [vec![2i64, 3], vec![1, 2], vec![3, 6], vec![2, 3, 4]] {
            let r = check_free_evolution(v, &x, 0.7, rates).unwrap();
            assert!(r.relative_free() < 1e-7, "{x:?}: {r:?}");
            if let Some(b) = r.relative_boundary() {
                assert!(b < 1e-7, "{x:?}: {r:?}");
            }
        }
        // the original rates violate the boundary condition
        let wrong = check_free_evolution(v, &[2, 3], 0.7, JumpRates::of(&pr, Direction::Forward)).unwrap();
        assert!(wrong.relative_boundary().unwrap() > 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let pr = ModelParams::new(0.3).unwrap();
        let o = UStepOptions::default();
        assert!(matches!(u_step(&[], 0.5, &pr, o), Err(Error::Size(_))));
        assert!(matches!(u_step(&[1, 2, 3, 4, 5, 6], 0.5, &pr, o), Err(Error::Size(_))));
        assert!(u_step(&[1], -1.0, &pr, o).is_err());
        assert!(u_step(&[1], 0.5, &pr, UStepOptions { nodes: 24 }).is_err());
    }
}
