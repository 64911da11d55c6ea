use serde::{Deserialize, Serialize};

use super::evolve::{evolve, Evolution};
use super::generator::{build_generator, GeneratorSpec, JumpRates};
use super::oracle::poisson_margin;
use super::state::{OccupationState, ParticleConfig, StateSpace};
use crate::error::{Error, Result};

/// The two self-duality functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualityVariant {
    /// `prod_j tau^{N_{x_j - 1}(eta)} eta_{x_j}`.
    Schutz,
    /// `prod_j tau^{N_{x_j}(eta)}`.
    Second,
}

/// Evaluates the duality functional `H(eta, x)` with `N_x` counted within
/// the window.
pub fn duality_functional(eta: &OccupationState, x: &ParticleConfig, variant: DualityVariant, tau: f64) -> Result<f64> {
    for &xj in x.coords() {
        let lowest = if variant == DualityVariant::Schutz { xj - 1 } else { xj };
        if !eta.contains(xj) || !eta.contains(lowest) {
            return Err(Error::Domain(format!(
                "coordinate {xj} needs sites outside the window [{}, {}]",
                eta.xmin(),
                eta.xmax()
            )));
        }
    }
    Ok(functional(eta, x.coords(), variant, tau))
}

/// As [`duality_functional`] but treating every site outside the window as
/// empty.
fn functional(eta: &OccupationState, x: &[i64], variant: DualityVariant, tau: f64) -> f64 {
    let mut exponent = 0usize;
    for &xj in x {
        match variant {
            DualityVariant::Schutz => {
                if !(eta.contains(xj) && eta.bits() >> (xj - eta.xmin()) & 1 == 1) {
                    return 0.0;
                }
                exponent += eta.count_le(xj - 1);
            }
            DualityVariant::Second => exponent += eta.count_le(xj),
        }
    }
    tau.powi(exponent as i32)
}

/// Largest window accepted by [`check_duality`].
pub const MAX_DUALITY_WINDOW: usize = 10;

/// Compares `E^eta[H(eta(t), x)]` with `E^x[H(eta, x(t))]` for every
/// occupation `eta` of the window `[1, window]` and every `x` with
/// coordinates in `[2, window - 1]`, returning the largest discrepancy.
///
/// `rates` are those of the occupation process; the coordinate process
/// runs with left and right swapped. Both sides are exact evolutions of the
/// finitely many particles on `Z`: `eta` is empty outside the window, and
/// the lattice is cut at a margin the particles cross with probability
/// below `1e-13`.
pub fn check_duality(window: usize, k: usize, t: f64, variant: DualityVariant, rates: JumpRates) -> Result<f64> {
    discrepancy(window, k, t, variant, rates, rates.swapped())
}

fn discrepancy(
    window: usize,
    k: usize,
    t: f64,
    variant: DualityVariant,
    rates: JumpRates,
    dual_rates: JumpRates,
) -> Result<f64> {
    if window > MAX_DUALITY_WINDOW || k == 0 || k > 3 || window < k + 2 {
        return Err(Error::Size(format!(
            "duality check needs k in 1..=3 and k + 2 <= window <= {MAX_DUALITY_WINDOW}, got k={k}, window={window}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let tau = rates.tau();
    let margin = poisson_margin(window, t, 1e-13) as i64;
    let (xmin, xmax) = (1 - margin, window as i64 + margin);
    let sites = (xmax - xmin + 1) as usize;
    let pad = |mask: u64| mask << margin;
    let padded = |mask: u64| OccupationState::from_bits(xmin, sites, pad(mask));

    let interior = StateSpace::Particles {
        xmin: 2,
        xmax: window as i64 - 1,
        count: k,
    };
    let duals: Vec<ParticleConfig> = (0..interior.size() as usize)
        .map(|i| interior.occupation(i).particles())
        .collect();
    let etas: Vec<u64> = (0..1u64 << window).collect();

    // lhs[e][d]: occupation process run forward, observable read at eta
    let mut lhs = vec![vec![0.0; duals.len()]; etas.len()];
    for n in 0..=window {
        let space = StateSpace::Particles { xmin, xmax, count: n };
        let q = build_generator(&GeneratorSpec::with_rates(space, rates))?;
        let members: Vec<u64> = etas.iter().copied().filter(|e| e.count_ones() as usize == n).collect();
        for (d, x) in duals.iter().enumerate() {
            let f: Vec<f64> = (0..q.dim())
                .map(|i| functional(&space.occupation(i), x.coords(), variant, tau))
                .collect();
            let g = evolve(&q, &f, t, Evolution::Observable)?;
            for &e in &members {
                lhs[e as usize][d] = g[space.index(pad(e))];
            }
        }
    }

    // coordinate process with swapped rates, distribution evolved from x
    let space = StateSpace::Particles { xmin, xmax, count: k };
    let q = build_generator(&GeneratorSpec::with_rates(space, dual_rates))?;
    let configs: Vec<ParticleConfig> = (0..q.dim()).map(|i| space.occupation(i).particles()).collect();
    let mut worst = 0.0f64;
    for (d, x) in duals.iter().enumerate() {
        let mut v = vec![0.0; q.dim()];
        v[space.index(x.to_mask(xmin, sites).expect("interior"))] = 1.0;
        let law = evolve(&q, &v, t, Evolution::Distribution)?;
        for &e in &etas {
            let eta = padded(e)?;
            let rhs: f64 = law
                .iter()
                .zip(&configs)
                .filter(|(&w, _)| w != 0.0)
                .map(|(&w, y)| w * functional(&eta, y.coords(), variant, tau))
                .sum();
            worst = worst.max((lhs[e as usize][d] - rhs).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::Direction;
    use crate::ModelParams;

    const TAU: f64 = 3.0 / 7.0;

    #[test]
    fn functional_examples() {
        let step = OccupationState::step(-2, 5).unwrap();
        let one = ParticleConfig::new(vec![1]).unwrap();
        assert_eq!(duality_functional(&step, &one, DualityVariant::Schutz, TAU).unwrap(), 1.0);
        let two = ParticleConfig::new(vec![2, 3]).unwrap();
        let h = duality_functional(&step, &two, DualityVariant::Schutz, TAU).unwrap();
        assert!((h - TAU.powi(3)).abs() < 1e-16);
        let empty_site = ParticleConfig::new(vec![0, 3]).unwrap();
        assert_eq!(duality_functional(&step, &empty_site, DualityVariant::Schutz, TAU).unwrap(), 0.0);
        let h2 = duality_functional(&step, &two, DualityVariant::Second, TAU).unwrap();
        assert!((h2 - TAU.powi(5)).abs() < 1e-16);
        let edge = ParticleConfig::new(vec![-2]).unwrap();
        assert!(duality_functional(&step, &edge, DualityVariant::Schutz, TAU).is_err());
        assert!(duality_functional(&step, &edge, DualityVariant::Second, TAU).is_ok());
    }

    #[test]
    fn zero_time_is_exact() {
        let rates = JumpRates::of(&ModelParams::new(0.3).unwrap(), Direction::Forward);
        for variant in [DualityVariant::Schutz, DualityVariant::Second] {
            assert_eq!(check_duality(5, 2, 0.0, variant, rates).unwrap(), 0.0);
        }
    }

    #[test]
    fn small_windows() {
        let rates = JumpRates::of(&ModelParams::new(0.3).unwrap(), Direction::Forward);
        assert!(check_duality(4, 1, 0.4, DualityVariant::Schutz, rates).unwrap() < 1e-10);
        assert!(check_duality(4, 2, 0.4, DualityVariant::Second, rates).unwrap() < 1e-10);
    }

    #[test]
    fn symmetric_case() {
        let rates = JumpRates::new(0.5, 0.5).unwrap();
        assert!(check_duality(4, 2, 0.3, DualityVariant::Schutz, rates).unwrap() < 1e-10);
    }

    #[test]
    fn wrong_orientation_is_detected() {
        // running the coordinate process with unswapped rates breaks duality
        let rates = JumpRates::of(&ModelParams::new(0.3).unwrap(), Direction::Forward);
        let bad = discrepancy(4, 1, 0.4, DualityVariant::Schutz, rates, rates).unwrap();
        assert!(bad > 1e-3, "{bad}");
    }
}
