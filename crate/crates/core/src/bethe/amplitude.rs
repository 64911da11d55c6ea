use crate::error::{Error, Result};
use crate::numerics::ModelParams;
use crate::C64;

/// `eps(xi) = p/xi + q xi - 1`.
pub fn epsilon(xi: C64, params: &ModelParams) -> Result<C64> {
    if xi == C64::new(0.0, 0.0) {
        return Err(Error::Pole("eps has a pole at xi = 0".into()));
    }
    Ok(params.p() / xi + params.q() * xi - 1.0)
}

#[inline]
pub(crate) fn eps_unchecked(xi: C64, p: f64, q: f64) -> C64 {
    p / xi + q * xi - 1.0
}

/// `S(a, b) = -(p + q a b - a) / (p + q a b - b)`.
pub fn scattering(a: C64, b: C64, params: &ModelParams) -> Result<C64> {
    let (p, q) = (params.p(), params.q());
    let den = p + q * a * b - b;
    if den.norm() < 1e-15 {
        return Err(Error::Pole(format!("S has a vanishing denominator at ({a}, {b})")));
    }
    Ok(-(p + q * a * b - a) / den)
}

/// `A_sigma(xi)`: the product of `S(xi_{sigma(i)}, xi_{sigma(j)})` over
/// inversions `i < j`, `sigma(i) > sigma(j)`. `sigma` is 0-based.
pub fn amplitude(sigma: &[usize], xi: &[C64], params: &ModelParams) -> Result<C64> {
    validate_permutation(sigma)?;
    if xi.len() != sigma.len() {
        return Err(Error::Size(format!("{} variables for a permutation of {}", xi.len(), sigma.len())));
    }
    let mut a = C64::new(1.0, 0.0);
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                a *= scattering(xi[sigma[i]], xi[sigma[j]], params)?;
            }
        }
    }
    Ok(a)
}

pub(crate) fn validate_permutation(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return Err(Error::InvalidParameter(format!("{sigma:?} is not a permutation")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Inversion pairs `(sigma(i), sigma(j))` of a permutation.
pub(crate) fn inversions(sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                out.push((sigma[i], sigma[j]));
            }
        }
    }
    out
}
