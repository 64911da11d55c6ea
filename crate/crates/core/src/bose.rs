//! Moments of the delta Bose gas: the nested contour formula for
//! `Zbar(x; t)`, its two-body boundary condition, and a finite-difference
//! oracle for two particles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{build_contour, tensor_sum, ContourShape};
use crate::C64;

/// Largest replica count.
pub const MAX_REPLICAS: usize = 4;
/// Step of the one-sided differences in [`check_bose_boundary`].
pub const BOUNDARY_STEP: f64 = 1e-3;

/// Interaction strength, replica count and the abscissas of the vertical
/// contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseParams {
    pub kappa: f64,
    pub alphas: Vec<f64>,
}

impl BoseParams {
    /// Default abscissas: `alpha_j = (k - j)(kappa + 1)` for `kappa > 0`,
    /// all zero otherwise.
    pub fn new(kappa: f64, k: usize) -> Result<Self> {
        let alphas = if kappa > 0.0 {
            (1..=k).map(|j| (k - j) as f64 * (kappa + 1.0)).collect()
        } else {
            vec![0.0; k]
        };
        Self::with_alphas(kappa, alphas)
    }

    pub fn with_alphas(kappa: f64, alphas: Vec<f64>) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be finite, got {kappa}")));
        }
        if alphas.is_empty() || alphas.len() > MAX_REPLICAS {
            return Err(Error::Size(format!("need 1..={MAX_REPLICAS} replicas, got {}", alphas.len())));
        }
        if kappa > 0.0 {
            if let Some(j) = (0..alphas.len() - 1).find(|&j| !(alphas[j] - alphas[j + 1] > kappa)) {
                return Err(Error::Geometry(format!(
                    "abscissas {} and {} must differ by more than kappa = {kappa}",
                    alphas[j],
                    alphas[j + 1]
                )));
            }
        }
        Ok(Self { kappa, alphas })
    }

    pub fn replicas(&self) -> usize {
        self.alphas.len()
    }
}

/// `Zbar(x; t) = (1/2 pi i)^k int...int prod_{A<B} (z_A - z_B)/(z_A - z_B - kappa)
/// prod_j e^{z_j^2 t / 2 + x_j z_j} dz_j` over `alpha_j + i R`.
///
/// The lines are cut at `|Im z| = T` with `T = sqrt(68 / t) + max|x| / t`,
/// where the Gaussian factor is below `e^{-34}`, and discretized by
/// `nodes` Gauss-Legendre points each (a power of two, at least 16).
pub fn she_moment(x: &[f64], t: f64, bose: &BoseParams, nodes: usize) -> Result<f64> {
    she_moment_with_cross(x, t, bose, bose.kappa, nodes)
}

/// As [`she_moment`] with the interaction in the cross factor replaced by
/// `cross_kappa` (a control for the boundary check).
fn she_moment_with_cross(x: &[f64], t: f64, bose: &BoseParams, cross_kappa: f64, nodes: usize) -> Result<f64> {
    let k = bose.replicas();
    if x.len() != k {
        return Err(Error::Size(format!("{} coordinates for {k} replicas", x.len())));
    }
    if x.windows(2).any(|w| w[0] > w[1]) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("coordinates must be finite and weakly increasing: {x:?}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let half_height = (68.0 / t).sqrt() + xmax / t;
    let mut lines = Vec::with_capacity(k);
    for (j, &alpha) in bose.alphas.iter().enumerate() {
        let c = build_contour(
            &ContourShape::VerticalLine {
                real_part: alpha,
                half_height,
            },
            nodes,
        )?;
        let f: Vec<C64> = c
            .nodes
            .iter()
            .zip(&c.weights)
            .map(|(&z, &w)| w * (z * z * (t / 2.0) + x[j] * z).exp())
            .collect();
        lines.push((c.nodes, f));
    }
    let interacting = cross_kappa != 0.0;
    let v = tensor_sum(&vec![nodes; k], |idx| {
        let mut v = C64::new(1.0, 0.0);
        for a in 0..k {
            v *= lines[a].1[idx[a]];
            if interacting {
                for b in a + 1..k {
                    let d = lines[a].0[idx[a]] - lines[b].0[idx[b]];
                    v *= d / (d - cross_kappa);
                }
            }
        }
        v
    });
    Ok(v.re)
}

/// Largest `|(d/dx_j - d/dx_{j+1} - kappa) Zbar|` at `x_j = x_{j+1}` over
/// the probes and their coinciding neighbours.
///
/// Each probe is a weakly increasing `k`-vector; every adjacent pair with
/// `x_j = x_{j+1}` is tested. The derivatives are second-order one-sided
/// differences with step [`BOUNDARY_STEP`], taken from inside
/// `x_j <= x_{j+1}`. The residual is absolute.
pub fn check_bose_boundary(kappa: f64, t: f64, probes: &[Vec<f64>], nodes: usize) -> Result<f64> {
    boundary_residual(kappa, kappa, t, probes, nodes)
}

fn boundary_residual(kappa: f64, cross_kappa: f64, t: f64, probes: &[Vec<f64>], nodes: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in probes {
        if x.len() < 2 {
            return Err(Error::Size("boundary checks need at least two replicas".into()));
        }
        let bose = BoseParams::new(kappa.max(cross_kappa), x.len())?;
        let bose = BoseParams {
            kappa,
            alphas: bose.alphas,
        };
        let v = |y: &[f64]| she_moment_with_cross(y, t, &bose, cross_kappa, nodes);
        let h = BOUNDARY_STEP;
        for j in 0..x.len() - 1 {
            if x[j] != x[j + 1] {
                continue;
            }
            let at = |dj: f64, dk: f64| {
                let mut y = x.clone();
                y[j] += dj;
                y[j + 1] += dk;
                v(&y)
            };
            let here = at(0.0, 0.0)?;
            let d_left = (3.0 * here - 4.0 * at(-h, 0.0)? + at(-2.0 * h, 0.0)?) / (2.0 * h);
            let d_right = (-3.0 * here + 4.0 * at(0.0, h)? - at(0.0, 2.0 * h)?) / (2.0 * h);
            worst = worst.max((d_left - d_right - kappa * here).abs());
        }
    }
    Ok(worst)
}

/// `Zbar((0, 0); t)` for two replicas from the relative-coordinate reduction:
/// `u_t = u_yy` on `y >= 0` with `u_y = -(kappa / 2) u` at `y = 0`, started
/// from a unit mass at the boundary, gives `Zbar = u(0, t) / sqrt(pi t)`.
///
/// Crank-Nicolson on `[0, 12 sqrt(t)]` with a ghost node for the Robin
/// condition and four half-size implicit Euler steps to damp the singular
/// start.
pub fn two_replica_oracle(kappa: f64, t: f64, dy: f64, dt: f64) -> Result<f64> {
    if !(t > 0.0 && dy > 0.0 && dt > 0.0 && dt <= t) {
        return Err(Error::InvalidParameter(format!("need t, dy, dt > 0 and dt <= t, got {t}, {dy}, {dt}")));
    }
    let a = kappa / 2.0;
    let n = (12.0 * t.sqrt() / dy).round() as usize + 1;
    let mut u = vec![0.0; n];
    // half the mass sits on the half cell at the boundary
    u[0] = 0.5 / (dy / 2.0);
    let steps = (t / dt).round() as usize;
    for s in 0..steps {
        if s < 4 {
            for _ in 0..2 {
                let r = 0.5 * dt / (dy * dy);
                u = tridiagonal_step(&u, r, 1.0, 0.0, a, dy);
            }
        } else {
            let r = dt / (dy * dy);
            u = tridiagonal_step(&u, r, 0.5, 0.5, a, dy);
        }
    }
    Ok(u[0] / (std::f64::consts::PI * t).sqrt())
}

/// One theta-step of `u_t = u_yy`: solves
/// `(I - implicit r D) u' = (I + explicit r D) u`, where `D` is the second
/// difference with the Robin ghost node at 0 and a zero value beyond the end.
fn tridiagonal_step(u: &[f64], r: f64, implicit: f64, explicit: f64, a: f64, dy: f64) -> Vec<f64> {
    let n = u.len();
    let second = |u: &[f64], i: usize| -> f64 {
        if i == 0 {
            2.0 * u[1] - 2.0 * u[0] + 2.0 * a * dy * u[0]
        } else if i == n - 1 {
            u[n - 2] - 2.0 * u[n - 1]
        } else {
            u[i + 1] - 2.0 * u[i] + u[i - 1]
        }
    };
    let rhs: Vec<f64> = (0..n).map(|i| u[i] + explicit * r * second(u, i)).collect();
    // bands of I - implicit r D
    let th = implicit * r;
    let mut diag = vec![1.0 + 2.0 * th; n];
    diag[0] = 1.0 - th * (-2.0 + 2.0 * a * dy);
    let mut upper = vec![-th; n];
    upper[0] = -2.0 * th;
    let lower = vec![-th; n];
    // Thomas algorithm
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn heat(x: f64, t: f64) -> f64 {
        (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
    }

    #[test]
    fn one_replica_is_heat_kernel() {
        let b = BoseParams::new(1.0, 1).unwrap();
        for (x, t) in [(0.0, 0.5), (1.3, 0.5), (-2.0, 1.7)] {
            let v = she_moment(&[x], t, &b, 128).unwrap();
            assert!((v - heat(x, t)).abs() < 1e-10, "{x} {t}: {v}");
        }
    }

    #[test]
    fn no_interaction_factorizes() {
        let x = [-0.4, 0.1, 0.9];
        let b = BoseParams::new(0.0, 3).unwrap();
        let v = she_moment(&x, 0.8, &b, 64).unwrap();
        let expect: f64 = x.iter().map(|&xi| heat(xi, 0.8)).product();
        assert!((v - expect).abs() < 1e-10);
    }

    #[test]
    fn two_replicas_match_pde() {
        let b = BoseParams::new(1.0, 2).unwrap();
        let v = she_moment(&[0.0, 0.0], 0.5, &b, 128).unwrap();
        let pde = two_replica_oracle(1.0, 0.5, 1e-3, 1e-4).unwrap();
        assert!((v - pde).abs() < 1e-4, "{v} vs {pde}");
        assert!((v - 0.63089298).abs() < 1e-7);
    }

    #[test]
    fn pde_without_interaction() {
        let pde = two_replica_oracle(0.0, 0.5, 1e-3, 1e-4).unwrap();
        assert!((pde - heat(0.0, 0.5).powi(2)).abs() < 1e-4);
    }

    #[test]
    fn deformation_picks_up_string_residue() {
        // moving the first line onto the second crosses z_1 = z_2 + kappa
        let (kappa, t, x) = (1.0, 0.5, [-0.3, 0.2]);
        let full = she_moment(&x, t, &BoseParams::new(kappa, 2).unwrap(), 128).unwrap();
        let flat = BoseParams {
            kappa,
            alphas: vec![0.0, 0.0],
        };
        let deformed = she_moment(&x, t, &flat, 128).unwrap();
        let line = build_contour(
            &ContourShape::VerticalLine {
                real_part: 0.0,
                half_height: 14.0,
            },
            256,
        )
        .unwrap();
        let residue = line.integrate(|z2| {
            let z1 = z2 + kappa;
            kappa * (z1 * z1 * (t / 2.0) + x[0] * z1 + z2 * z2 * (t / 2.0) + x[1] * z2).exp()
        });
        assert!((full - deformed - residue.re).abs() < 1e-10, "{full} vs {deformed} + {residue}");
    }

    #[test]
    fn boundary_condition_and_sensitivity() {
        let probes = vec![vec![0.0, 0.0], vec![0.5, 0.5]];
        let r = check_bose_boundary(1.0, 0.5, &probes, 128).unwrap();
        assert!(r < 1e-3, "{r}");
        let perturbed = boundary_residual(1.0, 1.1, 0.5, &probes, 128).unwrap();
        assert!(perturbed >= 10.0 * r, "{perturbed} vs {r}");
        assert!(check_bose_boundary(0.0, 0.5, &probes, 64).unwrap() < 1e-5);
    }

    #[test]
    fn symmetric_and_positive() {
        let b = BoseParams::new(0.7, 3).unwrap();
        let v = she_moment(&[0.0, 0.0, 0.4], 0.6, &b, 64).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn spacing_is_checked() {
        assert!(matches!(BoseParams::with_alphas(1.0, vec![0.8, 0.0]), Err(Error::Geometry(_))));
        assert!(BoseParams::with_alphas(-1.0, vec![0.0, 0.0]).is_ok());
        assert!(BoseParams::new(1.0, 5).is_err());
    }
}
