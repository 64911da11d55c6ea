//! The Airy function, the GUE Tracy-Widom distribution `F_GUE` as an
//! Airy-kernel Fredholm determinant, and finite-time comparisons of the
//! rescaled current with it.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::duality::{invert_distribution, InversionOptions, MAX_SUPPORT};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_currents, SimConfig};
use crate::numerics::gauss::{composite_gauss_legendre, gauss_legendre};
use crate::numerics::linalg::det_real;
use crate::numerics::ModelParams;

/// `Ai` is evaluated on `[-AIRY_RANGE, AIRY_RANGE]`.
pub const AIRY_RANGE: f64 = 30.0;
/// Smallest argument of [`f_gue`].
pub const MIN_GUE_ARGUMENT: f64 = -8.0;
/// Tolerated change of `F_GUE` under halving both quadratures.
pub const GUE_TOLERANCE: f64 = 1e-8;
/// Default node count of [`f_gue`].
pub const DEFAULT_GUE_NODES: usize = 64;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// The Airy function `Ai(x)` for `|x| <= 30`, to about `1e-14` absolute.
///
/// * `|x| <= 2`: Maclaurin series.
/// * `2 < x`: `Ai(x) = e^{-zeta} / pi int_0^inf exp(-sqrt(x) v^2) cos(v^3 / 3) dv`
///   with `zeta = (2/3) x^{3/2}`, which has no cancellation.
/// * `-8 <= x < -2`: Taylor stepping of `y'' = x y` from the origin.
/// * `x < -8`: the oscillatory asymptotic expansion.
pub fn airy_ai(x: f64) -> Result<f64> {
    if !(x.abs() <= AIRY_RANGE) {
        return Err(Error::Domain(format!("Ai is evaluated for |x| <= {AIRY_RANGE}, got {x}")));
    }
    Ok(if x.abs() <= 2.0 {
        maclaurin(x)
    } else if x > 2.0 {
        decaying_integral(x)
    } else if x >= -8.0 {
        taylor_stepping(x).0
    } else {
        oscillatory_asymptotic(-x)
    })
}

fn maclaurin(x: f64) -> f64 {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    for k in 1..60 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() + tg.abs() < 1e-18 * (f.abs() + g.abs()) {
            break;
        }
    }
    AI0 * f + AIP0 * g
}

fn decaying_integral(x: f64) -> f64 {
    let root = x.sqrt();
    // the Gaussian factor is below e^{-40} beyond vmax
    let vmax = (40.0 / root).sqrt();
    let (v, w) = composite_gauss_legendre(0.0, vmax, 8, 16);
    let integral: f64 = v
        .iter()
        .zip(&w)
        .map(|(&v, &w)| w * (-root * v * v).exp() * (v * v * v / 3.0).cos())
        .sum();
    (-2.0 / 3.0 * x * root).exp() / PI * integral
}

/// `(Ai(x), Ai'(x))` by Taylor steps of length at most 1/2 from the origin.
fn taylor_stepping(x: f64) -> (f64, f64) {
    let steps = (x.abs() / 0.5).ceil().max(1.0) as usize;
    let h = x / steps as f64;
    let (mut y, mut dy) = (AI0, AIP0);
    let mut x0 = 0.0;
    let mut a = [0.0f64; 48];
    for _ in 0..steps {
        a[0] = y;
        a[1] = dy;
        a[2] = x0 * y / 2.0;
        for n in 1..a.len() - 2 {
            a[n + 2] = (x0 * a[n] + a[n - 1]) / ((n + 2) as f64 * (n + 1) as f64);
        }
        let (mut ny, mut ndy) = (0.0, 0.0);
        for n in (0..a.len()).rev() {
            ny = ny * h + a[n];
            if n > 0 {
                ndy = ndy * h + n as f64 * a[n];
            }
        }
        y = ny;
        dy = ndy;
        x0 += h;
    }
    (y, dy)
}

/// `Ai(-r)` for large `r` from the expansion in `zeta = (2/3) r^{3/2}`.
fn oscillatory_asymptotic(r: f64) -> f64 {
    let zeta = 2.0 / 3.0 * r * r.sqrt();
    let (mut even, mut odd) = (0.0, 0.0);
    let mut u = 1.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 0..200usize {
        if k > 0 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            term = u / zeta.powi(k as i32);
        }
        if term.abs() > last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            even += sign * term;
        } else {
            odd += sign * term;
        }
    }
    let phase = zeta + PI / 4.0;
    (phase.sin() * even - phase.cos() * odd) / (PI.sqrt() * r.powf(0.25))
}

/// Airy kernel `K(x_i, x_j) = int_0^inf Ai(x_i + u) Ai(x_j + u) du` on the
/// given points, with the `u` integral cut where `x + u` reaches 14.
fn airy_kernel(points: &[f64], u_nodes: usize) -> Result<Vec<f64>> {
    let lowest = points.iter().copied().fold(f64::INFINITY, f64::min);
    let umax = (14.0 - lowest).max(1.0);
    let per = 16.min(u_nodes);
    let (u, w) = composite_gauss_legendre(0.0, umax, u_nodes / per, per);
    let n = points.len();
    let mut a = vec![0.0; n * u.len()];
    for (i, &x) in points.iter().enumerate() {
        for (l, &ul) in u.iter().enumerate() {
            let arg = x + ul;
            a[i * u.len() + l] = if arg > AIRY_RANGE { 0.0 } else { airy_ai(arg)? * w[l].sqrt() };
        }
    }
    let m = u.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = (0..m).map(|l| a[i * m + l] * a[j * m + l]).sum();
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}

/// Symmetrized Nystrom matrix `sqrt(w_i) K(x_i, x_j) sqrt(w_j)` on
/// `[s, s + L]`, `L = max(10, 4|s|)`, with `nodes` Gauss-Legendre points
/// and twice as many in `u`.
fn nystrom_matrix(s: f64, nodes: usize) -> Result<Vec<f64>> {
    let len = 10.0f64.max(4.0 * s.abs());
    let (g, gw) = gauss_legendre(nodes);
    let x: Vec<f64> = g.iter().map(|&g| s + 0.5 * len * (g + 1.0)).collect();
    let w: Vec<f64> = gw.iter().map(|&w| 0.5 * len * w).collect();
    let mut k = airy_kernel(&x, 2 * nodes)?;
    for i in 0..nodes {
        for j in 0..nodes {
            k[i * nodes + j] *= (w[i] * w[j]).sqrt();
        }
    }
    Ok(k)
}

fn gue_det(s: f64, nodes: usize) -> Result<f64> {
    let mut m = nystrom_matrix(s, nodes)?;
    for v in m.iter_mut() {
        *v = -*v;
    }
    for i in 0..nodes {
        m[i * nodes + i] += 1.0;
    }
    Ok(det_real(&mut m, nodes))
}

/// `F_GUE(s) = det(I - K_Ai)` on `L^2(s, inf)` for `s >= -8`.
///
/// `nodes` (even, at least 16) Gauss-Legendre points discretize the
/// interval; the value is compared against half resolution in both
/// quadratures, and a change above `1e-8` is a convergence error.
pub fn f_gue(s: f64, nodes: usize) -> Result<f64> {
    if !(s >= MIN_GUE_ARGUMENT && s.is_finite()) {
        return Err(Error::Domain(format!("F_GUE is evaluated for s >= {MIN_GUE_ARGUMENT}, got {s}")));
    }
    if nodes < 16 || nodes % 2 != 0 {
        return Err(Error::InvalidParameter(format!("node count must be even and >= 16, got {nodes}")));
    }
    let fine = gue_det(s, nodes)?;
    let coarse = gue_det(s, nodes / 2)?;
    let change = (fine - coarse).abs();
    if change > GUE_TOLERANCE {
        return Err(Error::convergence("F_GUE quadrature halving", change, GUE_TOLERANCE));
    }
    Ok(fine.clamp(0.0, 1.0))
}

/// Centering and scale of the current at macroscopic time `t`:
/// `(N_0(t / gamma) - t/4) / (2^{-4/3} t^{1/3})` tends to minus a GUE
/// Tracy-Widom variable.
///
/// The height function `2 N_0` fluctuates on the scale `2^{-1/3} t^{1/3}`,
/// so the current itself needs half of it. With `2^{-1/3} t^{1/3}` the
/// simulated law stays about 0.5 away from `F_GUE` at every time, while the
/// simulated mean and spread of `N_0` match the halved scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeScaling {
    pub t: f64,
    pub centering: f64,
    pub scale: f64,
    /// Time at which the process is observed, `t / gamma`.
    pub real_time: f64,
}

impl EdgeScaling {
    pub fn new(t: f64, params: &ModelParams) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
        }
        Ok(Self {
            t,
            centering: t / 4.0,
            scale: 2f64.powf(-4.0 / 3.0) * t.cbrt(),
            real_time: t / params.gamma(),
        })
    }

    /// `s = (t/4 - m) / scale`.
    pub fn to_s(&self, m: f64) -> f64 {
        (self.centering - m) / self.scale
    }

    /// The current `m` with `to_s(m) = s`; the event "scaled current
    /// `>= -s`" is `N_0 >= threshold(s)`.
    pub fn threshold(&self, s: f64) -> f64 {
        self.centering - s * self.scale
    }
}

/// Comparison grid: 33 equispaced points on `[-5, 3]`.
pub fn comparison_grid() -> Vec<f64> {
    (0..33).map(|i| -5.0 + 0.25 * i as f64).collect()
}

/// `F_GUE` on [`comparison_grid`], computed once.
pub fn f_gue_on_grid() -> Result<&'static [f64]> {
    static GRID: OnceLock<Vec<f64>> = OnceLock::new();
    if let Some(v) = GRID.get() {
        return Ok(v);
    }
    let values = comparison_grid()
        .into_iter()
        .map(|s| f_gue(s, DEFAULT_GUE_NODES))
        .collect::<Result<Vec<_>>>()?;
    Ok(GRID.get_or_init(|| values))
}

/// Where the law of `N_0(t / gamma)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScalingSource {
    /// Moment inversion (only resolvable while the current stays small).
    Exact,
    Simulation { replicas: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingComparison {
    pub scaling: EdgeScaling,
    pub grid: Vec<f64>,
    /// `P(scaled current >= -s)` on the grid.
    pub empirical: Vec<f64>,
    pub f_gue: Vec<f64>,
    /// `sup_s |empirical - F_GUE|` over the grid.
    pub distance: f64,
    /// Standard error of the empirical value where the supremum is
    /// attained (zero for the exact source).
    pub standard_error: f64,
}

/// Largest macroscopic time for the exact source.
pub const MAX_EXACT_SCALING_TIME: f64 = 50.0;
/// Macroscopic time range for the simulation source.
pub const SIMULATION_SCALING_TIMES: (f64, f64) = (20.0, 2000.0);

/// `sup_s |P((N_0(t/gamma) - t/4) / (2^{-4/3} t^{1/3}) >= -s) - F_GUE(s)|`
/// over [`comparison_grid`]. The empirical side is the right-continuous
/// step function of the integer current, with no continuity correction.
pub fn kpz_scaling_compare(t: f64, params: &ModelParams, source: ScalingSource) -> Result<ScalingComparison> {
    let scaling = EdgeScaling::new(t, params)?;
    let grid = comparison_grid();
    let (empirical, counts): (Vec<f64>, Option<f64>) = match source {
        ScalingSource::Exact => {
            if t > MAX_EXACT_SCALING_TIME {
                return Err(Error::Domain(format!("the exact source covers t <= {MAX_EXACT_SCALING_TIME}, got {t}")));
            }
            let d = invert_distribution(scaling.real_time, params, MAX_SUPPORT, InversionOptions::default())?;
            let emp = grid
                .iter()
                .map(|&s| {
                    let first = scaling.threshold(s).ceil().max(0.0) as usize;
                    1.0 - (0..first).map(|m| d.mass(m)).sum::<f64>()
                })
                .collect();
            (emp, None)
        }
        ScalingSource::Simulation { replicas, seed } => {
            let (lo, hi) = SIMULATION_SCALING_TIMES;
            if !(t >= lo && t <= hi) {
                return Err(Error::Domain(format!("the simulation source covers t in [{lo}, {hi}], got {t}")));
            }
            let cfg = SimConfig::new(*params, scaling.real_time, replicas, seed)?;
            let samples = sample_currents(&cfg)?;
            let n = samples.len() as f64;
            let emp = grid
                .iter()
                .map(|&s| {
                    let thr = scaling.threshold(s);
                    samples.iter().filter(|c| c.n0 as f64 >= thr).count() as f64 / n
                })
                .collect();
            (emp, Some(n))
        }
    };
    let f = f_gue_on_grid()?.to_vec();
    let (at, distance) = empirical
        .iter()
        .zip(&f)
        .map(|(e, g): (&f64, &f64)| (e - g).abs())
        .enumerate()
        .fold((0, 0.0f64), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    let standard_error = counts.map_or(0.0, |n| (empirical[at] * (1.0 - empirical[at]) / n).sqrt());
    Ok(ScalingComparison {
        scaling,
        grid,
        empirical,
        f_gue: f,
        distance,
        standard_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::symmetric_eigenvalues;

    // Ai from a 30-digit reference evaluation
    const REFERENCE: [(f64, f64); 13] = [
        (-25.0, 0.163_526_578_830_429_47),
        (-10.0, 0.040_241_238_486_443_19),
        (-8.0, -0.052_705_050_356_386_2),
        (-5.0, 0.350_761_009_024_114_3),
        (-2.0, 0.227_407_428_201_685_58),
        (-1.0, 0.535_560_883_292_352_1),
        (0.0, 0.355_028_053_887_817_24),
        (1.0, 0.135_292_416_312_881_42),
        (2.0, 0.034_924_130_423_274_38),
        (5.0, 1.083_444_281_360_744_2e-4),
        (6.0, 9.947_694_360_252_89e-6),
        (10.0, 1.104_753_255_289_868_6e-10),
        (25.0, 8.116_026_824_691_387e-38),
    ];

    #[test]
    fn reference_values() {
        for (x, v) in REFERENCE {
            let a = airy_ai(x).unwrap();
            assert!((a - v).abs() < 1e-13, "Ai({x}) = {a} vs {v}");
        }
    }

    #[test]
    fn solves_airy_equation_and_pieces_join() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let stencil = [1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];
        let h = 0.01;
        let fixed = [-28.0, -8.05, -7.97, -2.01, -1.99, 1.99, 2.01];
        let random: Vec<f64> = (0..30).map(|_| rng.random_range(-29.9..29.9)).collect();
        for &x in fixed.iter().chain(&random) {
            let second: f64 = stencil
                .iter()
                .enumerate()
                .map(|(i, c)| c * airy_ai(x + (i as f64 - 3.0) * h).unwrap())
                .sum::<f64>()
                / (h * h);
            let residual = (second - x * airy_ai(x).unwrap()).abs();
            assert!(residual < 1e-8, "x = {x}: {residual:e}");
        }
        // neighbouring pieces agree where they meet
        for x in [-8.5, -8.0, -7.5] {
            assert!((taylor_stepping(x).0 - oscillatory_asymptotic(-x)).abs() < 1e-13, "{x}");
        }
        for x in [-2.5, -2.0, -1.5] {
            assert!((taylor_stepping(x).0 - maclaurin(x)).abs() < 1e-13, "{x}");
        }
        for x in [1.5, 2.0, 2.5] {
            assert!((decaying_integral(x) - maclaurin(x)).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn decays_on_the_right() {
        let mut prev = airy_ai(1.0).unwrap();
        for i in 1..=58 {
            let v = airy_ai(1.0 + 0.5 * i as f64).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
        assert!(matches!(airy_ai(30.5), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_matches_closed_form() {
        // K(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)
        let pts = [-5.0, -2.5, -0.3, 0.8, 2.2];
        let k = airy_kernel(&pts, 256).unwrap();
        let ai: Vec<(f64, f64)> = pts.iter().map(|&x| taylor_stepping(x)).collect();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let exact = if i == j {
                    ai[i].1 * ai[i].1 - pts[i] * ai[i].0 * ai[i].0
                } else {
                    (ai[i].0 * ai[j].1 - ai[i].1 * ai[j].0) / (pts[i] - pts[j])
                };
                assert!((k[i * pts.len() + j] - exact).abs() < 1e-10, "{i} {j}");
            }
        }
    }

    #[test]
    fn kernel_is_positive_semidefinite() {
        for s in [-6.0, -1.0, 2.0] {
            let m = nystrom_matrix(s, 32).unwrap();
            let ev = symmetric_eigenvalues(&m, 32);
            assert!(ev.iter().all(|&e| e >= -1e-10), "s = {s}: {ev:?}");
        }
    }

    #[test]
    fn distribution_function() {
        let mut prev = 0.0;
        for i in 0..20 {
            let s = -6.0 + 0.6 * i as f64;
            let f = f_gue(s, DEFAULT_GUE_NODES).unwrap();
            assert!(f > prev && f < 1.0, "s = {s}");
            prev = f;
        }
        assert!(f_gue(-8.0, DEFAULT_GUE_NODES).unwrap() < 1e-6);
        assert!(1.0 - f_gue(6.0, DEFAULT_GUE_NODES).unwrap() < 1e-6);
        for s in [-4.0, -2.0, 0.0, 2.0] {
            let a = f_gue(s, DEFAULT_GUE_NODES).unwrap();
            let b = f_gue(s, 2 * DEFAULT_GUE_NODES).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
        assert!(matches!(f_gue(-9.0, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn mean_of_the_law() {
        // E[X] = s_max - int_{s_min}^{s_max} F(s) ds, against the known -1.7710868074
        let (s, w) = composite_gauss_legendre(-8.0, 6.0, 14, 8);
        let integral: f64 = s.iter().zip(&w).map(|(&s, &w)| w * f_gue(s, 48).unwrap()).sum();
        assert!((6.0 - integral + 1.771_086_807_4).abs() < 1e-6);
    }

    #[test]
    fn scaling_map() {
        let pr = ModelParams::new(0.3).unwrap();
        let e = EdgeScaling::new(8.0, &pr).unwrap();
        assert!((e.scale - 2f64.powf(-4.0 / 3.0) * 2.0).abs() < 1e-15);
        assert!((e.real_time - 20.0).abs() < 1e-12);
        assert!(e.to_s(3.0) < e.to_s(2.0));
        assert!((e.to_s(e.threshold(1.3)) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn exact_source_at_small_time() {
        let pr = ModelParams::new(0.3).unwrap();
        let c = kpz_scaling_compare(0.4, &pr, ScalingSource::Exact).unwrap();
        assert!(c.distance.is_finite() && c.distance <= 1.0);
        assert_eq!(c.standard_error, 0.0);
        assert!(kpz_scaling_compare(60.0, &pr, ScalingSource::Exact).is_err());
    }

    #[test]
    fn simulation_source() {
        let pr = ModelParams::new(0.3).unwrap();
        let c = kpz_scaling_compare(20.0, &pr, ScalingSource::Simulation { replicas: 400, seed: 5 }).unwrap();
        assert!(c.distance <= 1.0 && c.standard_error > 0.0);
        assert!(c.empirical.windows(2).all(|w| w[0] <= w[1]));
    }
}
