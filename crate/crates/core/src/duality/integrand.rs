use crate::error::{Error, Result};
use crate::numerics::ModelParams;
use crate::C64;

/// `eps'(z) = -z (p - q)^2 / ((1 + z)(p + q z))`, the eigenvalue of the free
/// generator in the duality variables. Poles at `-1` and `-tau`.
pub fn eps_prime(z: C64, params: &ModelParams) -> Result<C64> {
    let (p, q) = (params.p(), params.q());
    let den = (1.0 + z) * (p + q * z);
    if den.norm() < 1e-15 {
        return Err(Error::Pole(format!("eps' is singular at z = {z}")));
    }
    Ok(eps_prime_unchecked(z, p, q))
}

#[inline]
pub(crate) fn eps_prime_unchecked(z: C64, p: f64, q: f64) -> C64 {
    let g = p - q;
    -z * (g * g) / ((1.0 + z) * (p + q * z))
}

/// `h_{x,t}(z) = e^{eps'(z) t} ((1 + z)/(1 + z/tau))^{x-1} / (tau + z)`.
pub fn h(x: i64, t: f64, z: C64, params: &ModelParams) -> Result<C64> {
    let tau = params.tau();
    if (tau + z).norm() < 1e-15 || (1.0 + z).norm() < 1e-15 {
        return Err(Error::Pole(format!("h is singular at z = {z}")));
    }
    Ok(h_unchecked(x, t, z, params.p(), params.q()))
}

#[inline]
pub(crate) fn h_unchecked(x: i64, t: f64, z: C64, p: f64, q: f64) -> C64 {
    let tau = p / q;
    (eps_prime_unchecked(z, p, q) * t).exp() * ((1.0 + z) / (1.0 + z / tau)).powi((x - 1) as i32) / (tau + z)
}

/// `(z_a - z_b) / (z_a - tau z_b)`.
#[inline]
pub fn cross_factor(za: C64, zb: C64, tau: f64) -> C64 {
    (za - zb) / (za - tau * zb)
}

/// The change of variables `xi = (1 + z) / (1 + z/tau)` to the coordinate
/// Bethe ansatz variable.
pub fn xi_of_z(z: C64, tau: f64) -> C64 {
    (1.0 + z) / (1.0 + z / tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::epsilon;
    use proptest::prelude::*;

    fn pr() -> ModelParams {
        ModelParams::new(0.3).unwrap()
    }

    #[test]
    fn eps_prime_zero_and_poles() {
        let pr = pr();
        assert_eq!(eps_prime(C64::new(0.0, 0.0), &pr).unwrap(), C64::new(0.0, 0.0));
        assert!(eps_prime(C64::new(-1.0, 0.0), &pr).is_err());
        assert!(eps_prime(C64::new(-pr.tau(), 0.0), &pr).is_err());
        assert!(eps_prime(C64::new(-0.5, 0.1), &pr).is_ok());
    }

    #[test]
    fn measure_transforms() {
        // h_{x,t}(z) dz = e^{eps(xi) t} xi^{x-1} dxi / (tau - xi) up to the
        // Jacobian, which we compare directly
        let pr = pr();
        let tau = pr.tau();
        let z = C64::new(-0.4, 0.07);
        let xi = xi_of_z(z, tau);
        let dxi_dz = (1.0 - 1.0 / tau) / ((1.0 + z / tau) * (1.0 + z / tau));
        for x in [-2i64, 1, 3] {
            let lhs = h(x, 0.7, z, &pr).unwrap();
            let rhs = (epsilon(xi, &pr).unwrap() * 0.7).exp() * xi.powi((x - 1) as i32) / (tau - xi) * dxi_dz;
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }

    proptest! {
        #[test]
        fn cross_factor_matches_coordinate_form(
            ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0
        ) {
            let pr = pr();
            let (p, q, tau) = (pr.p(), pr.q(), pr.tau());
            let (za, zb) = (C64::new(ar, ai), C64::new(br, bi));
            prop_assume!((za - tau * zb).norm() > 1e-3 && (za + tau).norm() > 1e-3 && (zb + tau).norm() > 1e-3);
            let (xa, xb) = (xi_of_z(za, tau), xi_of_z(zb, tau));
            let den = p + q * xa * xb - xb;
            prop_assume!(den.norm() > 1e-3);
            let lhs = cross_factor(za, zb, tau);
            let rhs = q * (xa - xb) / den;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }
}
