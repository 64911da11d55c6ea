use serde::{Deserialize, Serialize};

use super::moments::{moment_table_partition, MomentOptions};
use crate::error::{Error, Result};
use crate::numerics::{vandermonde_solve, ModelParams};
use crate::tables::{DistributionTable, Method};

/// Largest support cutoff of [`invert_distribution`].
pub const MAX_SUPPORT: usize = 14;
/// Largest accepted estimate of the mass beyond the fitted support.
pub const MAX_TRUNCATION: f64 = 1e-4;
/// Moment errors are never taken below this.
pub const MOMENT_ERROR_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InversionOptions {
    pub moments: MomentOptions,
}

/// `P(N_0(t) = m)` from the moments `E[tau^{k N_0}]`, `k = 0..=M`, by solving
/// `sum_m P(m) (tau^k)^m = E[tau^{k N_0}]`.
///
/// The system is severely ill-conditioned (the inverse has row sums near
/// `5e6` at `M = 6`, `tau = 3/7`), so only a support `0..=M'`, `M' <= M`, is
/// fitted. Two errors compete: the moment errors amplified by the inverse
/// (its row sums times the largest moment error) and the unfitted mass
/// beyond `M'`, estimated by `|P(M')|`, which bounds it once the masses
/// decay. `M'` minimizes their sum. The unfitted-mass estimate must stay
/// below `1e-4`; both parts enter every entry's error. The table's tail is
/// `1 - sum_m P(m)`.
pub fn invert_distribution(t: f64, params: &ModelParams, max_support: usize, opts: InversionOptions) -> Result<DistributionTable> {
    if max_support > MAX_SUPPORT {
        return Err(Error::Size(format!("support cutoff must be <= {MAX_SUPPORT}, got {max_support}")));
    }
    let tau = params.tau();
    let moments = moment_table_partition(max_support, t, params, opts.moments)?;
    let delta = moments
        .entries
        .iter()
        .map(|e| e.error)
        .fold(MOMENT_ERROR_FLOOR, f64::max);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for fitted in 0..=max_support {
        let amplification = inverse_row_sums(tau, fitted)?;
        let nodes: Vec<f64> = (0..=fitted).map(|k| tau.powi(k as i32)).collect();
        let rhs: Vec<f64> = moments.entries[..=fitted].iter().map(|e| e.value).collect();
        let masses = vandermonde_solve(&nodes, &rhs)?;
        let noise = amplification.iter().fold(0.0f64, |a, &b| a.max(b)) * delta;
        let total = noise + masses[fitted].abs();
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, amplification, masses));
        }
    }
    let (_, amplification, masses) = best.expect("at least one support size");
    let fitted = masses.len() - 1;
    let truncation = if t == 0.0 { 0.0 } else { masses[fitted].abs() };
    if truncation > MAX_TRUNCATION {
        return Err(Error::Inversion(format!(
            "mass {truncation:e} at the fitted support edge m = {fitted}; t = {t} needs more resolvable support"
        )));
    }
    let errors = amplification.iter().map(|a| a * delta + truncation).collect();
    let tail = 1.0 - masses.iter().sum::<f64>();
    DistributionTable::new(Method::Duality, t, masses, errors, tail)
}

/// `sum_k |(V^{-1})_{mk}|` for the Vandermonde matrix on `tau^0..tau^M`.
fn inverse_row_sums(tau: f64, support: usize) -> Result<Vec<f64>> {
    let n = support + 1;
    let nodes: Vec<f64> = (0..n).map(|k| tau.powi(k as i32)).collect();
    let mut sums = vec![0.0; n];
    for k in 0..n {
        let mut unit = vec![0.0; n];
        unit[k] = 1.0;
        for (s, x) in sums.iter_mut().zip(vandermonde_solve(&nodes, &unit)?) {
            *s += x.abs();
        }
    }
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::StepOracle;

    #[test]
    fn time_zero_is_point_mass() {
        let pr = ModelParams::new(0.3).unwrap();
        let d = invert_distribution(0.0, &pr, 6, InversionOptions::default()).unwrap();
        assert!((d.mass(0) - 1.0).abs() < 1e-9);
        for m in 1..d.masses.len() {
            assert!(d.mass(m).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_exact_distribution() {
        let pr = ModelParams::new(0.3).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let d = invert_distribution(t, &pr, 12, InversionOptions::default()).unwrap();
            let exact = StepOracle::new(&pr, t, 10, 10).unwrap().current_distribution();
            for m in 0..=8 {
                assert!((d.mass(m) - exact[m]).abs() <= d.errors.get(m).copied().unwrap_or(1e-4).max(1e-12) + 1e-12, "t={t} m={m}: {} vs {}", d.mass(m), exact[m]);
                assert!((d.mass(m) - exact[m]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn rejects_large_support() {
        let pr = ModelParams::new(0.3).unwrap();
        assert!(matches!(invert_distribution(1.0, &pr, 15, InversionOptions::default()), Err(Error::Size(_))));
    }
}
