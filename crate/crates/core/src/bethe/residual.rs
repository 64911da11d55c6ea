use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::JumpRates;

/// Step of the centered time difference. The eighth-order stencil keeps
/// truncation negligible at this step while the roundoff of values with
/// absolute accuracy near machine epsilon stays below `1e-13`.
pub const TIME_STEP: f64 = 2e-2;

/// Weights of the eighth-order centered first derivative at offsets `1..=4`.
const STENCIL: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Residuals of the free evolution equation and the boundary condition at
/// one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|dv/dt - sum_j L_j v|`.
    pub free: f64,
    /// Largest `|left v(.., x_{j+1} - 1, ..) + right v(.., x_j + 1, ..) - v|`
    /// over adjacent pairs, if any.
    pub boundary: Option<f64>,
    /// `|v(x, t)|`, the scale for relative residuals.
    pub scale: f64,
}

impl Residuals {
    pub fn relative_free(&self) -> f64 {
        self.free / self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn relative_boundary(&self) -> Option<f64> {
        self.boundary.map(|b| b / self.scale.max(f64::MIN_POSITIVE))
    }
}

/// Checks `v` against `dv/dt = sum_j L_j v` with the single-particle
/// generator `L f(x) = right [f(x+1) - f(x)] + left [f(x-1) - f(x)]` in each
/// coordinate, and against the boundary condition wherever
/// `x_{j+1} = x_j + 1`. `v` must be evaluable off the Weyl chamber.
pub fn check_free_evolution<V>(v: V, x: &[i64], t: f64, rates: JumpRates) -> Result<Residuals>
where
    V: Fn(&[i64], f64) -> Result<f64>,
{
    if t <= 4.0 * TIME_STEP {
        return Err(Error::InvalidParameter(format!(
            "time {t} too small for the centered stencil with step {TIME_STEP}"
        )));
    }
    let here = v(x, t)?;
    let mut dvdt = 0.0;
    for (i, w) in STENCIL.iter().enumerate() {
        let h = (i + 1) as f64 * TIME_STEP;
        dvdt += w * (v(x, t + h)? - v(x, t - h)?);
    }
    dvdt /= TIME_STEP;
    let mut generator = 0.0;
    let mut moved = x.to_vec();
    for j in 0..x.len() {
        moved[j] = x[j] + 1;
        let up = v(&moved, t)?;
        moved[j] = x[j] - 1;
        let down = v(&moved, t)?;
        moved[j] = x[j];
        generator += rates.right * (up - here) + rates.left * (down - here);
    }
    let mut boundary: Option<f64> = None;
    for j in 0..x.len().saturating_sub(1) {
        if x[j + 1] != x[j] + 1 {
            continue;
        }
        let mut a = x.to_vec();
        a[j + 1] -= 1;
        let mut b = x.to_vec();
        b[j] += 1;
        let r = (rates.left * v(&a, t)? + rates.right * v(&b, t)? - here).abs();
        boundary = Some(boundary.map_or(r, |m: f64| m.max(r)));
    }
    Ok(Residuals {
        free: (dvdt - generator).abs(),
        boundary,
        scale: here.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{bethe_solution, bethe_term, GreenOptions};
    use crate::markov::Direction;
    use crate::ModelParams;

    #[test]
    fn constant_in_time() {
        let rates = JumpRates::new(0.3, 0.7).unwrap();
        let f = |x: &[i64], _t: f64| Ok((x[0] * x[0] + 3 * x[1]) as f64);
        let r = check_free_evolution(f, &[1, 4], 1.0, rates).unwrap();
        // L acting on x0^2 + 3 x1: 0.3(2x0+1) + 0.7(-2x0+1) + 3(0.3 - 0.7)
        let expect: f64 = 0.3 * 3.0 + 0.7 * (-1.0) + 3.0 * (0.3 - 0.7);
        assert!((r.free - expect.abs()).abs() < 1e-12);
        assert!(r.boundary.is_none());
    }

    #[test]
    fn bethe_sum_passes_single_terms_fail() {
        let pr = ModelParams::new(0.3).unwrap();
        // as a function of x the transition probability evolves under the
        // adjoint generator
        let rates = JumpRates::of(&pr, Direction::Adjoint);
        let y = [0i64, 1];
        let opts = GreenOptions::default();
        let full = |x: &[i64], t: f64| Ok(bethe_solution(&y, x, t, &pr, opts)?.re);
        let r = check_free_evolution(full, &[0, 1], 0.5, rates).unwrap();
        assert!(r.relative_free() < 1e-7, "{r:?}");
        assert!(r.relative_boundary().unwrap() < 1e-7, "{r:?}");
        let single = |x: &[i64], t: f64| Ok(bethe_term(&[0, 1], &y, x, t, &pr, opts)?.re);
        let s = check_free_evolution(single, &[0, 1], 0.5, rates).unwrap();
        assert!(s.relative_free() < 1e-7);
        assert!(s.relative_boundary().unwrap() > 1e-3, "{s:?}");
    }
}
