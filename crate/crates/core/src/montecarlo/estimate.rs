use serde::{Deserialize, Serialize};

use super::sim::{sample_currents, CurrentSample, SimConfig};
use crate::error::{Error, Result};
use crate::numerics::qseries::{q_pochhammer_real, Length};
use crate::numerics::sum::pairwise_sum;
use crate::tables::{DistributionTable, Method, MomentEntry, MomentTable};

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

fn mean_and_stderr(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return Estimate { value: mean, stderr: 0.0 };
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    }
}

/// Largest `k` accepted by the moment estimator.
pub const MAX_MOMENT_ORDER: usize = 8;

/// Sample means of `tau^{k n0}` for `k = 0..=kmax`.
pub fn moments_from_samples(samples: &[CurrentSample], tau: f64, t: f64, kmax: usize) -> Result<MomentTable> {
    if kmax > MAX_MOMENT_ORDER {
        return Err(Error::Size(format!("kmax must be <= {MAX_MOMENT_ORDER}, got {kmax}")));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let entries = (0..=kmax)
        .map(|k| {
            if k == 0 {
                return MomentEntry { k, value: 1.0, error: 0.0 };
            }
            let v: Vec<f64> = samples.iter().map(|s| tau.powf((k as u64 * s.n0) as f64)).collect();
            let e = mean_and_stderr(&v);
            MomentEntry {
                k,
                value: e.value,
                error: e.stderr,
            }
        })
        .collect();
    Ok(MomentTable {
        method: Method::MonteCarlo,
        t,
        entries,
    })
}

/// Empirical law of `n0` on `0..=mmax` with the overflow as tail.
pub fn distribution_from_samples(samples: &[CurrentSample], t: f64, mmax: usize) -> Result<DistributionTable> {
    if mmax < 1 {
        return Err(Error::InvalidParameter("mmax must be at least 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let n = samples.len() as f64;
    let mut counts = vec![0u64; mmax + 2];
    for s in samples {
        counts[(s.n0 as usize).min(mmax + 1)] += 1;
    }
    let masses: Vec<f64> = counts[..=mmax].iter().map(|&c| c as f64 / n).collect();
    let errors = masses.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
    let tail = counts[mmax + 1] as f64 / n;
    DistributionTable::new(Method::MonteCarlo, t, masses, errors, tail)
}

/// Sample mean of `1/(zeta tau^{n0}; tau)_inf`.
pub fn tau_laplace_from_samples(samples: &[CurrentSample], tau: f64, zeta: f64) -> Result<Estimate> {
    if !(zeta.abs() < 1.0) {
        return Err(Error::Domain(format!("|zeta| must be below 1, got {zeta}")));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let max_n0 = samples.iter().map(|s| s.n0).max().unwrap_or(0) as usize;
    // one Pochhammer per distinct n0
    let table: Vec<f64> = (0..=max_n0)
        .map(|m| 1.0 / q_pochhammer_real(zeta * tau.powi(m as i32), tau, Length::Infinite))
        .collect();
    let v: Vec<f64> = samples.iter().map(|s| table[s.n0 as usize]).collect();
    Ok(mean_and_stderr(&v))
}

pub fn estimate_moments(cfg: &SimConfig, kmax: usize) -> Result<MomentTable> {
    let samples = sample_currents(cfg)?;
    moments_from_samples(&samples, cfg.params.tau(), cfg.horizon, kmax)
}

pub fn estimate_distribution(cfg: &SimConfig, mmax: usize) -> Result<DistributionTable> {
    let samples = sample_currents(cfg)?;
    distribution_from_samples(&samples, cfg.horizon, mmax)
}

pub fn estimate_tau_laplace(cfg: &SimConfig, zeta: f64) -> Result<Estimate> {
    if !(zeta.abs() < 1.0) {
        return Err(Error::Domain(format!("|zeta| must be below 1, got {zeta}")));
    }
    let samples = sample_currents(cfg)?;
    tau_laplace_from_samples(&samples, cfg.params.tau(), zeta)
}
