use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::integrand::eps_prime_unchecked;
use super::moments::{moment_table_partition, MomentOptions, MAX_PARTITION_ORDER};
use super::ustep::small_circle_radius;
use crate::error::{Error, Result};
use crate::numerics::qseries::{q_pochhammer, q_pochhammer_real, Length};
use crate::numerics::sum::pairwise_sum_c;
use crate::numerics::{build_contour, fredholm_det, ContourShape, ModelParams};
use crate::C64;

/// Largest time accepted by the determinant routes.
pub const MAX_DET_TIME: f64 = 5.0;
/// Tolerated series tail and determinant node-halving drift.
pub const LAPLACE_TOLERANCE: f64 = 1e-8;
/// Tail target of the truncated `s` line.
pub const S_TAIL: f64 = 1e-14;

/// A `tau`-Laplace transform value `E[1 / (zeta tau^{N_0(t)}; tau)_inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceValue {
    pub value: C64,
    /// Quadrature error estimate.
    pub error: f64,
    /// Series truncation bound (zero for the determinant routes).
    pub truncation: f64,
}

/// `sum_{k <= kmax} zeta^k E[tau^{k N_0}] / (tau; tau)_k` with partition
/// moments, convergent for `|zeta| < 1`. The truncation bound is the larger of the geometric tail from
/// the last two terms and `|zeta|^{kmax+1} mu_kmax / ((1 - |zeta|)(tau; tau)_inf)`,
/// which holds because the moments decrease in `k`.
pub fn tau_laplace_series(zeta: f64, t: f64, params: &ModelParams, kmax: usize, opts: MomentOptions) -> Result<LaplaceValue> {
    let tau = params.tau();
    if !(zeta.abs() < 1.0) {
        return Err(Error::Domain(format!("the series needs |zeta| < 1, got {zeta}")));
    }
    if !(2..=MAX_PARTITION_ORDER).contains(&kmax) {
        return Err(Error::Size(format!("kmax must lie in 2..={MAX_PARTITION_ORDER}, got {kmax}")));
    }
    let moments = moment_table_partition(kmax, t, params, opts)?;
    let mut terms = Vec::with_capacity(kmax + 1);
    let mut error = 0.0;
    for e in &moments.entries {
        let weight = zeta.powi(e.k as i32) / q_pochhammer_real(tau, tau, Length::Finite(e.k));
        terms.push(weight * e.value);
        error += weight.abs() * e.error;
    }
    let (last, before) = (terms[kmax].abs(), terms[kmax - 1].abs());
    let ratio = if before > 0.0 { last / before } else { 0.0 };
    if ratio >= 1.0 {
        return Err(Error::Truncation(format!("series terms do not decay at k = {kmax}")));
    }
    let geometric = last * ratio / (1.0 - ratio);
    let a = zeta.abs();
    let monotone = a.powi(kmax as i32 + 1) * moments.entries[kmax].value.abs()
        / ((1.0 - a) * q_pochhammer_real(tau, tau, Length::Infinite));
    let truncation = geometric.max(monotone);
    if truncation > LAPLACE_TOLERANCE {
        return Err(Error::Truncation(format!(
            "series tail bound {truncation:e} exceeds {LAPLACE_TOLERANCE:e}; raise kmax"
        )));
    }
    let value: f64 = terms.iter().rev().sum();
    Ok(LaplaceValue {
        value: C64::new(value, 0.0),
        error,
        truncation,
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=MAX_DET_TIME).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "determinant routes need 0 <= t <= {MAX_DET_TIME}, got {t}"
        )));
    }
    Ok(())
}

fn check_drift(what: &'static str, error: f64, value: C64) -> Result<()> {
    let tol = LAPLACE_TOLERANCE * value.norm().max(1.0);
    if error > tol {
        return Err(Error::convergence(what, error, tol));
    }
    Ok(())
}

/// `det(I - zeta K_2) / (zeta; tau)_inf` with `K_2(w, w') = e^{eps'(w) t} / (tau w - w')`
/// on the small circle about `-tau`.
pub fn det_cauchy(zeta: C64, t: f64, params: &ModelParams, nodes: usize) -> Result<LaplaceValue> {
    check_time(t)?;
    let (p, q, tau) = (params.p(), params.q(), params.tau());
    let poch = q_pochhammer(zeta, tau, Length::Infinite);
    if poch.norm() < 1e-12 {
        return Err(Error::Domain(format!("zeta = {zeta} is (close to) a pole tau^-j")));
    }
    let contour = build_contour(
        &ContourShape::Circle {
            center: C64::new(-tau, 0.0),
            radius: small_circle_radius(tau),
        },
        nodes,
    )?;
    let det = fredholm_det(
        |w: C64, w2: C64| (eps_prime_unchecked(w, p, q) * t).exp() / (tau * w - w2),
        &contour,
        -zeta,
    )?;
    let value = det.value / poch;
    let error = det.error / poch.norm();
    check_drift("Cauchy determinant node halving", error, value)?;
    Ok(LaplaceValue {
        value,
        error,
        truncation: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinBarnesOptions {
    /// Nyström nodes on the `w` circle.
    pub w_nodes: usize,
    /// Gauss-Legendre nodes on the truncated `s` line (a power of two).
    pub s_nodes: usize,
    /// Real part of the `s` line; `None` picks the midpoint of the
    /// admissible interval (see [`abscissa_range`]).
    pub abscissa: Option<f64>,
}

impl Default for MellinBarnesOptions {
    fn default() -> Self {
        Self {
            w_nodes: 128,
            s_nodes: 1024,
            abscissa: None,
        }
    }
}

/// Largest `|zeta|` accepted by [`det_mellin_barnes`], `0.9 (tau; tau)_inf`.
pub fn mellin_barnes_radius(tau: f64) -> f64 {
    0.9 * q_pochhammer_real(tau, tau, Length::Infinite)
}

/// Half height of the `s` line at which `2 pi e^{-pi |Im s|}` falls below
/// [`S_TAIL`].
pub fn s_truncation() -> f64 {
    ((2.0 * PI).ln() - S_TAIL.ln()) / PI
}

/// Radius of the `w` circle, `(1 + tau)/2`.
pub fn mellin_barnes_w_radius(tau: f64) -> f64 {
    0.5 * (1.0 + tau)
}

fn log_g(w: C64, t: f64, params: &ModelParams) -> C64 {
    let tau = params.tau();
    params.gamma() * t * tau / (tau + w)
}

/// Admissible real parts of the `s` line. Closing the line to the right must
/// enclose only the poles `s = 1, 2, ...` of `pi / sin(-pi s)`. The factor
/// `1/g(tau^s w)` is singular where `tau^s w = -tau`, i.e. on
/// `Re s = ln(tau / |w|) / ln tau`, so the line must lie to the right of that
/// and left of `s = 1`.
pub fn abscissa_range(tau: f64) -> (f64, f64) {
    ((tau / mellin_barnes_w_radius(tau)).ln() / tau.ln(), 1.0)
}

fn abscissa(tau: f64, opts: &MellinBarnesOptions) -> f64 {
    let (lo, hi) = abscissa_range(tau);
    opts.abscissa.unwrap_or(0.5 * (lo + hi))
}

fn check_mellin_barnes(zeta: f64, params: &ModelParams, opts: &MellinBarnesOptions) -> Result<()> {
    if !(zeta < 0.0) {
        return Err(Error::Domain(format!("(-zeta)^s needs zeta < 0, got {zeta}")));
    }
    let tau = params.tau();
    if -zeta >= mellin_barnes_radius(tau) {
        return Err(Error::Domain(format!(
            "zeta must exceed -0.9 (tau; tau)_inf = {}, got {zeta}",
            -mellin_barnes_radius(tau)
        )));
    }
    let c = abscissa(tau, opts);
    let (lo, hi) = abscissa_range(tau);
    if !(c > lo && c < hi) {
        return Err(Error::Geometry(format!("line Re s = {c} must lie in ({lo}, {hi})")));
    }
    Ok(())
}

/// Nodes and weights (including `1/(2 pi i)`) of the truncated `s` line.
fn s_line(tau: f64, opts: &MellinBarnesOptions) -> Result<(Vec<C64>, Vec<C64>)> {
    let line = build_contour(
        &ContourShape::VerticalLine {
            real_part: abscissa(tau, opts),
            half_height: s_truncation(),
        },
        opts.s_nodes,
    )?;
    Ok((line.nodes, line.weights))
}

/// `(1/2 pi i) int pi/sin(-pi s) (-zeta)^s g(w)/g(tau^s w) / (w' - tau^s w) ds`
/// over the line `Re s = c` truncated at [`s_truncation`].
pub fn mellin_barnes_kernel(w: C64, w2: C64, zeta: f64, t: f64, params: &ModelParams, opts: &MellinBarnesOptions) -> Result<C64> {
    check_mellin_barnes(zeta, params, opts)?;
    let (s, ws) = s_line(params.tau(), opts)?;
    Ok(kernel_on_line(w, w2, zeta, t, params, &s, &ws))
}

fn kernel_on_line(w: C64, w2: C64, zeta: f64, t: f64, params: &ModelParams, s: &[C64], ws: &[C64]) -> C64 {
    let tau = params.tau();
    let (ln_tau, ln_mz) = (tau.ln(), (-zeta).ln());
    let lg = log_g(w, t, params);
    let terms: Vec<C64> = s
        .iter()
        .zip(ws)
        .map(|(&s, &weight)| {
            let shifted = (s * ln_tau).exp() * w;
            let log = s * ln_mz + lg - log_g(shifted, t, params);
            weight * PI / (-PI * s).sin() * log.exp() / (w2 - shifted)
        })
        .collect();
    pairwise_sum_c(&terms)
}

/// The residue series `sum_{n >= 1} zeta^n g(w)/g(tau^n w) / (w' - tau^n w)`
/// which the line integral must reproduce, summed until terms drop below
/// `1e-17` relative.
pub fn residue_kernel(w: C64, w2: C64, zeta: f64, t: f64, params: &ModelParams) -> Result<C64> {
    let tau = params.tau();
    let lg = log_g(w, t, params);
    let mut sum = C64::new(0.0, 0.0);
    let mut shifted = w;
    let mut power = 1.0;
    for _ in 1..=400 {
        shifted *= tau;
        power *= zeta;
        let term = power * (lg - log_g(shifted, t, params)).exp() / (w2 - shifted);
        sum += term;
        if term.norm() < 1e-17 * sum.norm().max(1e-300) {
            return Ok(sum);
        }
    }
    Err(Error::Truncation(format!("residue series at zeta = {zeta} does not converge")))
}

/// `det(I + K_zeta)` with the Mellin-Barnes kernel on the circle
/// `|w| = (1 + tau)/2`.
pub fn det_mellin_barnes(zeta: f64, t: f64, params: &ModelParams, opts: MellinBarnesOptions) -> Result<LaplaceValue> {
    check_time(t)?;
    check_mellin_barnes(zeta, params, &opts)?;
    let (s, ws) = s_line(params.tau(), &opts)?;
    let contour = build_contour(
        &ContourShape::Circle {
            center: C64::new(0.0, 0.0),
            radius: mellin_barnes_w_radius(params.tau()),
        },
        opts.w_nodes,
    )?;
    let det = fredholm_det(
        |w: C64, w2: C64| kernel_on_line(w, w2, zeta, t, params, &s, &ws),
        &contour,
        C64::new(1.0, 0.0),
    )?;
    check_drift("Mellin-Barnes determinant node halving", det.error, det.value)?;
    Ok(LaplaceValue {
        value: det.value,
        error: det.error,
        truncation: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::StepOracle;

    fn exact_laplace(zeta: f64, t: f64, pr: &ModelParams) -> f64 {
        let tau = pr.tau();
        let dist = StepOracle::new(pr, t, 8, 8).unwrap().current_distribution();
        dist.iter()
            .enumerate()
            .map(|(m, &pm)| pm / q_pochhammer_real(zeta * tau.powi(m as i32), tau, Length::Infinite))
            .sum()
    }

    #[test]
    fn zeta_zero_is_one() {
        let pr = ModelParams::new(0.3).unwrap();
        let s = tau_laplace_series(0.0, 1.0, &pr, 8, MomentOptions::default()).unwrap();
        assert!((s.value.re - 1.0).abs() < 1e-15);
        let c = det_cauchy(C64::new(0.0, 0.0), 1.0, &pr, 64).unwrap();
        assert!((c.value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn time_zero_is_one() {
        let pr = ModelParams::new(0.3).unwrap();
        for z in [-0.3, 0.2, 0.5] {
            let c = det_cauchy(C64::new(z, 0.0), 0.0, &pr, 64).unwrap();
            assert!((c.value - 1.0 / q_pochhammer_real(z, pr.tau(), Length::Infinite)).norm() < 1e-12, "{z}: {}", c.value);
        }
    }

    #[test]
    fn routes_agree_with_exact_transform() {
        let pr = ModelParams::new(0.3).unwrap();
        for zeta in [-0.05, -0.1, -0.2] {
            let exact = exact_laplace(zeta, 1.0, &pr);
            let s = tau_laplace_series(zeta, 1.0, &pr, 20, MomentOptions::default()).unwrap();
            let c = det_cauchy(C64::new(zeta, 0.0), 1.0, &pr, 64).unwrap();
            let m = det_mellin_barnes(zeta, 1.0, &pr, MellinBarnesOptions::default()).unwrap();
            for (name, v) in [("series", s.value), ("cauchy", c.value), ("mb", m.value)] {
                assert!((v.re - exact).abs() < 1e-9 && v.im.abs() < 1e-9, "{name} at {zeta}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn other_asymmetry() {
        let pr = ModelParams::new(0.35).unwrap();
        let s = tau_laplace_series(-0.15, 1.0, &pr, 20, MomentOptions::default()).unwrap();
        let c = det_cauchy(C64::new(-0.15, 0.0), 1.0, &pr, 64).unwrap();
        assert!((s.value - c.value).norm() < 1e-6);
    }

    #[test]
    fn line_integral_matches_residue_series() {
        let pr = ModelParams::new(0.3).unwrap();
        let r = mellin_barnes_w_radius(pr.tau());
        let opts = MellinBarnesOptions::default();
        for (a, b) in [(0.3, 2.0), (1.0, -2.5), (4.0, 4.0)] {
            let (w, w2) = (C64::from_polar(r, a), C64::from_polar(r, b));
            let line = mellin_barnes_kernel(w, w2, -0.1, 1.0, &pr, &opts).unwrap();
            let res = residue_kernel(w, w2, -0.1, 1.0, &pr).unwrap();
            assert!((line - res).norm() < 1e-10, "{line} vs {res}");
        }
    }

    #[test]
    fn domains() {
        let pr = ModelParams::new(0.3).unwrap();
        let o = MellinBarnesOptions::default();
        assert!(matches!(det_mellin_barnes(0.1, 1.0, &pr, o), Err(Error::Domain(_))));
        assert!(matches!(det_mellin_barnes(-0.5, 1.0, &pr, o), Err(Error::Domain(_))));
        assert!(matches!(tau_laplace_series(-1.0, 1.0, &pr, 10, MomentOptions::default()), Err(Error::Domain(_))));
        let bad = MellinBarnesOptions { abscissa: Some(0.5), ..o };
        assert!(matches!(det_mellin_barnes(-0.1, 1.0, &pr, bad), Err(Error::Geometry(_))));
        assert!(matches!(tau_laplace_series(-0.19, 1.0, &pr, 4, MomentOptions::default()), Err(Error::Truncation(_))));
        assert!(matches!(det_cauchy(C64::new(1.0, 0.0), 1.0, &pr, 64), Err(Error::Domain(_))));
        assert!(det_cauchy(C64::new(-0.1, 0.0), 6.0, &pr, 64).is_err());
    }
}
