use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrand::{cross_factor, eps_prime_unchecked};
use crate::error::{Error, Result};
use crate::numerics::qseries::{q_pochhammer_real, Length};
use crate::numerics::{tensor_sum, ModelParams};
use crate::tables::{Method, MomentEntry, MomentTable};
use crate::C64;

/// Largest moment order of the partition route.
pub const MAX_PARTITION_ORDER: usize = 24;
/// Largest moment order of the nested-contour route.
pub const MAX_NESTED_ORDER: usize = 4;
/// Tolerated coarse/fine disagreement of a moment.
pub const MOMENT_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    /// Trapezoid nodes on the circle `|w| = (1 + tau)/2`.
    pub nodes: usize,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { nodes: 128 }
    }
}

/// `E[tau^{k N_0(t)}]` for `k = 0..=kmax` by the partition expansion.
///
/// Summed over partitions, the expansion is the `zeta^k` coefficient of
/// `det(I + K_zeta)` times `(tau; tau)_k`, where
/// `K_zeta(w, w') = sum_{n >= 1} zeta^n e^{t sum_{i<n} eps'(tau^i w)} / (w' - tau^n w)`
/// on the circle `|w| = (1 + tau)/2`. The determinant is expanded exactly in
/// `zeta` by Gaussian elimination over truncated power series, which sums all
/// partitions of every `k <= kmax` at once. Errors compare `N` and `N/2`
/// nodes.
pub fn moment_table_partition(kmax: usize, t: f64, params: &ModelParams, opts: MomentOptions) -> Result<MomentTable> {
    if kmax > MAX_PARTITION_ORDER {
        return Err(Error::Size(format!("moment order must be <= {MAX_PARTITION_ORDER}, got {kmax}")));
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
    let fine = series_moments(kmax, t, params, opts.nodes);
    let coarse = series_moments(kmax, t, params, opts.nodes / 2);
    let mut entries = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let error = (fine[k] - coarse[k]).norm();
        if error > MOMENT_TOLERANCE {
            return Err(Error::convergence("partition moment node doubling", error, MOMENT_TOLERANCE));
        }
        entries.push(MomentEntry {
            k,
            value: fine[k].re,
            error: error.max(fine[k].im.abs()),
        });
    }
    Ok(MomentTable {
        method: Method::Partition,
        t,
        entries,
    })
}

/// A single moment by the partition route.
pub fn moment_partition(k: usize, t: f64, params: &ModelParams, opts: MomentOptions) -> Result<f64> {
    let table = moment_table_partition(k, t, params, opts)?;
    Ok(table.entries[k].value)
}

/// `(tau; tau)_k [zeta^k] det(I + K_zeta)` for `k = 0..=kmax`.
fn series_moments(kmax: usize, t: f64, params: &ModelParams, n: usize) -> Vec<C64> {
    let (p, q, tau) = (params.p(), params.q(), params.tau());
    let len = kmax + 1;
    let radius = 0.5 * (1.0 + tau);
    let w: Vec<C64> = (0..n)
        .map(|m| C64::from_polar(radius, 2.0 * PI * m as f64 / n as f64))
        .collect();
    // a[(i * n + j) * len + d]: coefficient of zeta^d in entry (i, j)
    let mut a = vec![C64::new(0.0, 0.0); n * n * len];
    a.par_chunks_mut(n * len).enumerate().for_each(|(i, row)| {
        // exponent of g(w)/g(tau^m w) accumulated over m
        let mut log_ratio = C64::new(0.0, 0.0);
        let mut shifted = w[i];
        for d in 1..len {
            log_ratio += eps_prime_unchecked(shifted, p, q) * t;
            shifted *= tau;
            let ratio = log_ratio.exp();
            for j in 0..n {
                row[j * len + d] = ratio * w[j] / n as f64 / (w[j] - shifted);
            }
        }
        row[i * len] = C64::new(1.0, 0.0);
    });
    let det = series_determinant(&mut a, n, len);
    det.iter()
        .enumerate()
        .map(|(k, &c)| c * q_pochhammer_real(tau, tau, Length::Finite(k)))
        .collect()
}

/// Determinant of a matrix of truncated power series whose constant term
/// is the identity, by elimination without pivoting (every pivot is a unit).
fn series_determinant(a: &mut [C64], n: usize, len: usize) -> Vec<C64> {
    let mut det = vec![C64::new(0.0, 0.0); len];
    det[0] = C64::new(1.0, 0.0);
    for c in 0..n {
        let pivot: Vec<C64> = a[(c * n + c) * len..(c * n + c + 1) * len].to_vec();
        det = series_mul(&det, &pivot);
        let inverse = series_inverse(&pivot);
        let pivot_row: Vec<C64> = a[c * n * len..(c + 1) * n * len].to_vec();
        let (_, below) = a.split_at_mut((c + 1) * n * len);
        below.par_chunks_mut(n * len).for_each(|row| {
            let factor = series_mul(&row[c * len..(c + 1) * len], &inverse);
            if factor.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                return;
            }
            for j in c + 1..n {
                let src = &pivot_row[j * len..(j + 1) * len];
                let dst = &mut row[j * len..(j + 1) * len];
                for d in 1..len {
                    let mut acc = C64::new(0.0, 0.0);
                    for e in 1..=d {
                        acc += factor[e] * src[d - e];
                    }
                    dst[d] -= acc;
                }
            }
        });
    }
    det
}

fn series_mul(x: &[C64], y: &[C64]) -> Vec<C64> {
    let len = x.len();
    (0..len)
        .map(|d| (0..=d).map(|e| x[e] * y[d - e]).sum())
        .collect()
}

/// Inverse of a series with unit constant term.
fn series_inverse(x: &[C64]) -> Vec<C64> {
    let len = x.len();
    let mut inv = vec![C64::new(0.0, 0.0); len];
    inv[0] = C64::new(1.0, 0.0) / x[0];
    for d in 1..len {
        let acc: C64 = (1..=d).map(|e| x[e] * inv[d - e]).sum();
        inv[d] = -acc * inv[0];
    }
    inv
}

/// Contours for the nested moment formula: contour `j` is the union of the
/// circle `|z| = rho[j]` and the circle `|z + tau| = sigma`, both
/// counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedGeometry {
    pub rho: Vec<f64>,
    pub sigma: f64,
}

impl NestedGeometry {
    /// `sigma = 0.4 tau (1 - tau)/(1 + tau)`; the outermost radius is
    /// `(tau - sigma)/2` and each inner one is `tau/3` times the next.
    pub fn standard(k: usize, tau: f64) -> Self {
        let sigma = 0.4 * tau * (1.0 - tau) / (1.0 + tau);
        let mut rho = vec![0.0; k];
        let mut r = 0.5 * (tau - sigma);
        for slot in rho.iter_mut().rev() {
            *slot = r;
            r *= tau / 3.0;
        }
        Self { rho, sigma }
    }

    /// Contour `a` must contain `0` and `-tau` but neither `-1` nor `tau`
    /// times any later contour `b > a`.
    pub fn check(&self, tau: f64) -> Result<()> {
        let s = self.sigma;
        if !(s > 0.0 && s < 1.0 - tau) {
            return Err(Error::Geometry(format!("circle about -tau has radius {s}, must lie in (0, 1 - tau)")));
        }
        for (a, &ra) in self.rho.iter().enumerate() {
            if !(ra > 0.0 && ra + s < tau) {
                return Err(Error::Geometry(format!("contour {a}: circles of radii {ra} and {s} overlap")));
            }
            for &rb in &self.rho[a + 1..] {
                let ok = tau * rb > ra
                    && tau * rb < tau - s
                    && tau * tau - tau * s > ra
                    && tau * (1.0 - tau) > s + tau * s;
                if !ok {
                    return Err(Error::Geometry(format!(
                        "contour {a} (radius {ra}) is not nested inside tau times a later contour (radius {rb})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `E[tau^{k N_0(t)}]` from the k-fold nested contour integral
/// `tau^{k(k-1)/2} oint...oint prod_{a<b} (z_a - z_b)/(z_a - tau z_b)
///  prod_j e^{eps'(z_j) t} dz_j / z_j`, with the error estimate from halving
/// the node count.
pub fn moment_nested(k: usize, t: f64, params: &ModelParams, geometry: &NestedGeometry, nodes: usize) -> Result<MomentEntry> {
    if k > MAX_NESTED_ORDER {
        return Err(Error::Size(format!("nested moments need k <= {MAX_NESTED_ORDER}, got {k}")));
    }
    if geometry.rho.len() != k {
        return Err(Error::Size(format!("geometry has {} contours for k = {k}", geometry.rho.len())));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if nodes < 16 || !nodes.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("node count must be a power of two >= 16, got {nodes}")));
    }
    geometry.check(params.tau())?;
    if k == 0 {
        return Ok(MomentEntry { k, value: 1.0, error: 0.0 });
    }
    let fine = nested_integral(t, params, geometry, nodes);
    let coarse = nested_integral(t, params, geometry, nodes / 2);
    let error = (fine - coarse).norm().max(fine.im.abs());
    if error > MOMENT_TOLERANCE {
        return Err(Error::convergence("nested moment node doubling", error, MOMENT_TOLERANCE));
    }
    Ok(MomentEntry { k, value: fine.re, error })
}

/// Nested moments `k = 0..=kmax` with the standard geometry.
pub fn moment_table_nested(kmax: usize, t: f64, params: &ModelParams, nodes: usize) -> Result<MomentTable> {
    let entries = (0..=kmax)
        .map(|k| moment_nested(k, t, params, &NestedGeometry::standard(k, params.tau()), nodes))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentTable {
        method: Method::Nested,
        t,
        entries,
    })
}

fn nested_integral(t: f64, params: &ModelParams, geometry: &NestedGeometry, n: usize) -> C64 {
    let (p, q, tau) = (params.p(), params.q(), params.tau());
    let k = geometry.rho.len();
    let mut z = Vec::with_capacity(k);
    let mut f = Vec::with_capacity(k);
    for &rho in &geometry.rho {
        let mut zj = Vec::with_capacity(2 * n);
        let mut fj = Vec::with_capacity(2 * n);
        for (center, radius) in [(0.0, rho), (-tau, geometry.sigma)] {
            for m in 0..n {
                let e = C64::from_polar(radius, 2.0 * PI * m as f64 / n as f64);
                let node = center + e;
                zj.push(node);
                fj.push(e / n as f64 * (eps_prime_unchecked(node, p, q) * t).exp() / node);
            }
        }
        z.push(zj);
        f.push(fj);
    }
    let sum = tensor_sum(&vec![2 * n; k], |idx| {
        let mut v = C64::new(1.0, 0.0);
        for a in 0..k {
            v *= f[a][idx[a]];
            for b in a + 1..k {
                v *= cross_factor(z[a][idx[a]], z[b][idx[b]], tau);
            }
        }
        v
    });
    sum * tau.powi((k * (k - 1) / 2) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::det_complex;
    use crate::numerics::{enumerate_partitions, tau_factorial};

    /// The partition expansion written out term by term: one l(lambda)-fold
    /// trapezoid sum of a determinant per partition.
    fn partition_oracle(k: usize, t: f64, params: &ModelParams, n: usize) -> f64 {
        let (p, q, tau) = (params.p(), params.q(), params.tau());
        let radius = 0.5 * (1.0 + tau);
        let w: Vec<C64> = (0..n)
            .map(|m| C64::from_polar(radius, 2.0 * PI * m as f64 / n as f64))
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for lambda in enumerate_partitions(k).unwrap() {
            let parts = lambda.parts().to_vec();
            let l = parts.len();
            let s = tensor_sum(&vec![n; l], |idx| {
                let mut m = vec![C64::new(0.0, 0.0); l * l];
                for i in 0..l {
                    for j in 0..l {
                        m[i * l + j] = -1.0 / (w[idx[i]] * tau.powi(parts[i] as i32) - w[idx[j]]);
                    }
                }
                let mut v = det_complex(&mut m, l);
                for j in 0..l {
                    let wj = w[idx[j]];
                    let e: C64 = (0..parts[j]).map(|i| eps_prime_unchecked(wj * tau.powi(i as i32), p, q)).sum();
                    v *= (e * t).exp() * wj / n as f64;
                }
                v
            });
            total += s * (1.0 - tau).powi(k as i32) / lambda.multiplicity_factorial();
        }
        (total * tau_factorial(k, tau)).re
    }

    #[test]
    fn matches_partition_by_partition_sum() {
        let pr = ModelParams::new(0.3).unwrap();
        for t in [0.5, 1.0] {
            let table = moment_table_partition(4, t, &pr, MomentOptions::default()).unwrap();
            for k in 1..=4 {
                let oracle = partition_oracle(k, t, &pr, if k <= 3 { 64 } else { 48 });
                assert!((table.entries[k].value - oracle).abs() < 1e-8, "t={t} k={k}: {} vs {oracle}", table.entries[k].value);
            }
        }
    }

    #[test]
    fn time_zero_is_one() {
        let pr = ModelParams::new(0.3).unwrap();
        let table = moment_table_partition(10, 0.0, &pr, MomentOptions::default()).unwrap();
        for e in &table.entries {
            assert!((e.value - 1.0).abs() < 1e-12, "k={}: {}", e.k, e.value);
        }
    }

    #[test]
    fn reference_values() {
        // exact finite-window values of E[tau^{k N_0(1)}] at p = 0.3
        let pr = ModelParams::new(0.3).unwrap();
        let table = moment_table_partition(4, 1.0, &pr, MomentOptions::default()).unwrap();
        let expect = [1.0, 0.73326755, 0.62055212, 0.57253907, 0.55201596];
        for (e, x) in table.entries.iter().zip(expect) {
            assert!((e.value - x).abs() < 1e-8, "k={}: {} vs {x}", e.k, e.value);
        }
    }

    #[test]
    fn nested_matches_partition() {
        let pr = ModelParams::new(0.3).unwrap();
        let part = moment_table_partition(4, 0.5, &pr, MomentOptions::default()).unwrap();
        for k in 0..=3 {
            let g = NestedGeometry::standard(k, pr.tau());
            let v = moment_nested(k, 0.5, &pr, &g, 64).unwrap();
            assert!((v.value - part.entries[k].value).abs() < 1e-9, "k={k}: {} vs {}", v.value, part.entries[k].value);
        }
        assert!((moment_nested(1, 0.0, &pr, &NestedGeometry::standard(1, pr.tau()), 32).unwrap().value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn geometry_is_checked() {
        let pr = ModelParams::new(0.3).unwrap();
        let tau = pr.tau();
        for k in 1..=4 {
            NestedGeometry::standard(k, tau).check(tau).unwrap();
        }
        let bad = NestedGeometry {
            rho: vec![0.2, 0.2],
            sigma: 0.05,
        };
        assert!(matches!(bad.check(tau), Err(Error::Geometry(_))));
        assert!(matches!(moment_nested(2, 0.5, &pr, &bad, 32), Err(Error::Geometry(_))));
        assert!(moment_nested(5, 0.5, &pr, &NestedGeometry::standard(5, tau), 32).is_err());
    }
}
