use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::amplitude::{eps_unchecked, inversions, validate_permutation};
use crate::error::{Error, Result};
use crate::markov::ParticleConfig;
use crate::numerics::sum::pairwise_sum_c;
use crate::numerics::{permutations, tensor_sum, ModelParams};
use crate::C64;

/// Largest particle count for the transition probability.
pub const MAX_GREEN_PARTICLES: usize = 5;

/// Tolerated imaginary part of the transition probability.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Multiple of the rounding bound still accepted as imaginary part.
const ROUNDING_SLACK: f64 = 10.0;

/// Radius of the circles about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Radius {
    /// One radius for every variable; must satisfy `q r^2 + r < p`.
    Fixed(f64),
    /// Per variable, as close to the saddle point of `|xi^e e^{eps(xi) t}|`
    /// as the amplitude poles allow.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenOptions {
    pub radius: Radius,
    /// Trapezoid nodes per variable.
    pub nodes: usize,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self {
            radius: Radius::Adaptive,
            nodes: 64,
        }
    }
}

/// The radius `r` with `q r^2 + r = p`; every `S` denominator is nonzero
/// when all `|xi| < r`.
fn radius_limit(params: &ModelParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    (-1.0 + (1.0 + 4.0 * p * q).sqrt()) / (2.0 * q)
}

/// Safety factor on the pole distance of the amplitude.
const POLE_MARGIN: f64 = 0.5;
/// Largest adaptive radius.
const MAX_RADIUS: f64 = 10.0;

/// Smallest radius considered.
const MIN_RADIUS: f64 = 1e-3;

/// Saddle point of `r^e e^{(p/r + q r) t}`.
fn saddle(e: i64, t: f64, params: &ModelParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    if t == 0.0 {
        return 0.5 * radius_limit(params);
    }
    let e = e as f64;
    ((-e + (e * e + 4.0 * p * q * t * t).sqrt()) / (2.0 * q * t)).min(MAX_RADIUS)
}

/// `log |xi^e e^{eps(xi) t}|` at `xi = e^u`, the size of one variable's
/// factor on its circle.
fn log_size(e: i64, u: f64, t: f64, params: &ModelParams) -> f64 {
    e as f64 * u + (params.p() * (-u).exp() + params.q() * u.exp()) * t
}

/// Radii for one permutation's integral.
///
/// The inversion `(a, b)` contributes the denominator `p + q xi_a xi_b - xi_b`,
/// which stays away from zero while `r_b (1 + q r_a) <= p / 2`. Any radii in
/// this region give the same integral (it contains the small equal radii
/// of the defining formula and is connected), so the radii minimizing the
/// integrand size are chosen: a convex problem in `log r`, solved by
/// Nelder-Mead with the constraints as a barrier.
fn choose_radii(exponents: &[i64], inv: &[(usize, usize)], t: f64, params: &ModelParams, radius: Radius) -> Result<Vec<f64>> {
    let (p, q) = (params.p(), params.q());
    if let Radius::Fixed(r) = radius {
        if !(r > 0.0 && q * r * r + r < p) {
            return Err(Error::Geometry(format!(
                "radius {r} violates q r^2 + r < p, which keeps the amplitude poles outside"
            )));
        }
        return Ok(vec![r; exponents.len()]);
    }
    let k = exponents.len();
    let target: Vec<f64> = exponents.iter().map(|&e| saddle(e, t, params).ln()).collect();
    let coupled: Vec<usize> = (0..k).filter(|&a| inv.iter().any(|&(i, j)| i == a || j == a)).collect();
    let mut u = target.clone();
    if coupled.is_empty() {
        return Ok(u.iter().map(|x| x.exp()).collect());
    }
    let bound = (POLE_MARGIN * p).ln();
    let objective = |v: &[f64]| -> f64 {
        let mut full = target.clone();
        for (&a, &x) in coupled.iter().zip(v) {
            full[a] = x;
        }
        if v.iter().any(|&x| !(MIN_RADIUS.ln()..=MAX_RADIUS.ln()).contains(&x)) {
            return f64::INFINITY;
        }
        for &(big, small) in inv {
            if full[small] + (1.0 + q * full[big].exp()).ln() > bound {
                return f64::INFINITY;
            }
        }
        coupled
            .iter()
            .map(|&a| log_size(exponents[a], full[a], t, params))
            .sum()
    };
    // feasible start: small equal radii, clipped to the saddles
    let start_u = (0.5 * radius_limit(params)).ln();
    let start: Vec<f64> = coupled
        .iter()
        .map(|&a| target[a].min(start_u).max(MIN_RADIUS.ln()))
        .collect();
    let best = nelder_mead(&objective, start, 0.3, 600);
    for (&a, &x) in coupled.iter().zip(&best) {
        u[a] = x;
    }
    Ok(u.iter().map(|x| x.exp()).collect())
}

/// Minimizes `f` from `x0`; infeasible points evaluate to infinity and
/// the initial simplex is shrunk until it is feasible.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, iterations: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let mut h = -step;
        loop {
            let mut x = x0.clone();
            x[i] += h;
            if f(&x).is_finite() || h.abs() < 1e-9 {
                simplex.push(x);
                break;
            }
            h *= 0.5;
        }
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);
        if (values[worst] - values[best]).abs() < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| order[..n].iter().map(|&i| simplex[i][d]).sum::<f64>() / n as f64)
            .collect();
        let along = |c: f64| -> Vec<f64> {
            (0..n).map(|d| centroid[d] + c * (simplex[worst][d] - centroid[d])).collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = along(0.5);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                let anchor = simplex[best].clone();
                for i in 0..=n {
                    if i != best {
                        for d in 0..n {
                            simplex[i][d] = anchor[d] + 0.5 * (simplex[i][d] - anchor[d]);
                        }
                        values[i] = f(&simplex[i]);
                    }
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    simplex.swap_remove(best)
}

fn validate(y: &[i64], x: &[i64], t: f64, nodes: usize) -> Result<()> {
    if y.is_empty() || y.len() > MAX_GREEN_PARTICLES || x.len() != y.len() {
        return Err(Error::Size(format!(
            "need 1..={MAX_GREEN_PARTICLES} particles in both configurations, got {} and {}",
            y.len(),
            x.len()
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if nodes < 4 {
        return Err(Error::InvalidParameter(format!("at least 4 nodes are needed, got {nodes}")));
    }
    Ok(())
}

/// One permutation's k-fold integral
/// `oint A_sigma(xi) prod_j xi_{sigma(j)}^{x_j - y_{sigma(j)} - 1} e^{eps(xi_j) t} dxi / (2 pi i)^k`,
/// evaluated for arbitrary `x` in `Z^k`.
pub fn bethe_term(sigma: &[usize], y: &[i64], x: &[i64], t: f64, params: &ModelParams, opts: GreenOptions) -> Result<C64> {
    validate(y, x, t, opts.nodes)?;
    Ok(term_with_bound(sigma, y, x, t, params, opts)?.0)
}

/// The term together with a bound on the rounding error of its quadrature,
/// `eps` times an upper bound of the sum of the absolute summands.
fn term_with_bound(sigma: &[usize], y: &[i64], x: &[i64], t: f64, params: &ModelParams, opts: GreenOptions) -> Result<(C64, f64)> {
    validate_permutation(sigma)?;
    if sigma.len() != y.len() {
        return Err(Error::Size("permutation size differs from particle count".into()));
    }
    let k = y.len();
    let n = opts.nodes;
    let (p, q) = (params.p(), params.q());
    let mut exponents = vec![0i64; k];
    for j in 0..k {
        exponents[sigma[j]] = x[j] - y[sigma[j]] - 1;
    }
    let inv = inversions(sigma);
    let radii = choose_radii(&exponents, &inv, t, params, opts.radius)?;
    // per variable: nodes and the single-variable factors including weights
    let mut xi = Vec::with_capacity(k);
    let mut factors = Vec::with_capacity(k);
    for (&e, &r) in exponents.iter().zip(&radii) {
        let z: Vec<C64> = (0..n).map(|m| C64::from_polar(r, 2.0 * PI * m as f64 / n as f64)).collect();
        let f: Vec<C64> = z
            .iter()
            .map(|&z| z / n as f64 * z.powi(e as i32) * (eps_unchecked(z, p, q) * t).exp())
            .collect();
        xi.push(z);
        factors.push(f);
    }
    let mut bound = f64::EPSILON;
    for f in &factors {
        bound *= n as f64 * f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    for &(a, b) in &inv {
        let mut largest = 0.0f64;
        for &za in &xi[a] {
            for &zb in &xi[b] {
                let prod = q * za * zb;
                largest = largest.max(((p + prod - za) / (p + prod - zb)).norm());
            }
        }
        bound *= largest;
    }
    let sizes = vec![n; k];
    let value = tensor_sum(&sizes, |idx| {
        let mut v = C64::new(1.0, 0.0);
        for a in 0..k {
            v *= factors[a][idx[a]];
        }
        for &(a, b) in &inv {
            let (za, zb) = (xi[a][idx[a]], xi[b][idx[b]]);
            let prod = q * za * zb;
            v *= -(p + prod - za) / (p + prod - zb);
        }
        v
    });
    Ok((value, bound))
}

/// The full Bethe sum over all permutations at arbitrary `x` in `Z^k`.
pub fn bethe_solution(y: &[i64], x: &[i64], t: f64, params: &ModelParams, opts: GreenOptions) -> Result<C64> {
    Ok(solution_with_bound(y, x, t, params, opts)?.0)
}

fn solution_with_bound(y: &[i64], x: &[i64], t: f64, params: &ModelParams, opts: GreenOptions) -> Result<(C64, f64)> {
    validate(y, x, t, opts.nodes)?;
    let terms = permutations(y.len())
        .iter()
        .map(|sigma| term_with_bound(sigma, y, x, t, params, opts))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<C64> = terms.iter().map(|t| t.0).collect();
    Ok((pairwise_sum_c(&values), terms.iter().map(|t| t.1).sum()))
}

/// `P(x(t) = x | x(0) = y)` for k-particle ASEP.
///
/// Far from `y` the integrands are much larger than the result and rounding
/// dominates; the imaginary part is rejected only when it exceeds both
/// [`IMAGINARY_TOLERANCE`] and a multiple of the rounding bound.
pub fn green_function(
    y: &ParticleConfig,
    x: &ParticleConfig,
    t: f64,
    params: &ModelParams,
    opts: GreenOptions,
) -> Result<f64> {
    let (v, rounding) = solution_with_bound(y.coords(), x.coords(), t, params, opts)?;
    let tolerance = IMAGINARY_TOLERANCE.max(ROUNDING_SLACK * rounding);
    if v.im.abs() > tolerance {
        return Err(Error::convergence("transition probability imaginary part", v.im.abs(), tolerance));
    }
    Ok(v.re)
}
