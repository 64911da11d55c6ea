use super::evolve::{evolve, Evolution};
use super::generator::{build_generator, Direction, GeneratorSpec};
use super::state::{OccupationState, StateSpace};
use crate::error::{Error, Result};
use crate::numerics::ModelParams;

/// Law of a free walker jumping right at rate `right` and left at `left`:
/// `P(X_t = d) = e^{-(r+l)t} (r/l)^{d/2} I_{|d|}(2t sqrt(rl))`.
pub fn free_walk_probability(right: f64, left: f64, t: f64, d: i64) -> f64 {
    if t == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    let n = d.unsigned_abs() as f64;
    let z = 2.0 * t * (right * left).sqrt();
    let half_log = (z / 2.0).ln();
    let base = -(right + left) * t + 0.5 * d as f64 * (right / left).ln();
    // I_n(z) = sum_m (z/2)^{2m+n} / (m! (m+n)!)
    let mut sum = 0.0;
    let mut m = 0.0f64;
    loop {
        let log_term = base + (2.0 * m + n) * half_log - ln_gamma_int(m) - ln_gamma_int(m + n);
        let term = log_term.exp();
        sum += term;
        if m > z && term < 1e-18 * sum.max(1e-300) {
            break;
        }
        m += 1.0;
        if m > 10_000.0 {
            break;
        }
    }
    sum
}

fn ln_gamma_int(k: f64) -> f64 {
    (1..=k as u64).map(|j| (j as f64).ln()).sum()
}

/// Smallest `M` with `particles * P(Pois(t) >= M) < eps`.
///
/// Every particle attempts jumps at total rate 1, so this bounds the chance
/// that any of them travels `M` sites.
pub fn poisson_margin(particles: usize, t: f64, eps: f64) -> usize {
    let particles = particles.max(1) as f64;
    (0..)
        .find(|&m| particles * poisson_tail(t, m) < eps)
        .expect("Poisson tail vanishes")
}

/// `P(Pois(t) >= m)` by direct summation of the tail terms.
fn poisson_tail(t: f64, m: usize) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mut log_term = -t + m as f64 * t.ln() - ln_gamma_int(m as f64);
    let mut k = m;
    let mut s = 0.0;
    loop {
        let term = log_term.exp();
        s += term;
        if (k as f64 > t && term < 1e-20 * s) || term == 0.0 && k as f64 > t {
            return s;
        }
        k += 1;
        log_term += t.ln() - (k as f64).ln();
    }
}

/// Exact law of ASEP from step data on the window `[-left, right]` (the
/// `right` particles start at `1..=right`), by uniformization.
#[derive(Debug, Clone)]
pub struct StepOracle {
    space: StateSpace,
    probabilities: Vec<f64>,
}

impl StepOracle {
    pub fn new(params: &ModelParams, t: f64, left: usize, right: usize) -> Result<Self> {
        if right == 0 {
            return Err(Error::InvalidParameter("step oracle needs at least one particle".into()));
        }
        let space = StateSpace::Particles {
            xmin: -(left as i64),
            xmax: right as i64,
            count: right,
        };
        let q = build_generator(&GeneratorSpec::new(space, Direction::Forward, params))?;
        let mut v = vec![0.0; q.dim()];
        let start = (left + 1..=left + right).fold(0u64, |m, b| m | 1 << b);
        v[space.index(start)] = 1.0;
        let probabilities = evolve(&q, &v, t, Evolution::Distribution)?;
        Ok(Self { space, probabilities })
    }

    /// `E[f(eta(t))]`.
    pub fn expectation(&self, f: impl Fn(&OccupationState) -> f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| p * f(&self.space.occupation(i)))
            .sum()
    }

    /// `P(N_0(t) = m)` for `m = 0..=right`.
    pub fn current_distribution(&self) -> Vec<f64> {
        let count = match self.space {
            StateSpace::Particles { count, .. } => count,
            StateSpace::Occupation { .. } => unreachable!(),
        };
        let mut out = vec![0.0; count + 1];
        for (i, &p) in self.probabilities.iter().enumerate() {
            out[self.space.occupation(i).count_le(0)] += p;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_walk_is_a_distribution() {
        let s: f64 = (-40..=40).map(|d| free_walk_probability(0.3, 0.7, 2.0, d)).sum();
        assert!((s - 1.0).abs() < 1e-14);
        let mean: f64 = (-40..=40).map(|d| d as f64 * free_walk_probability(0.3, 0.7, 2.0, d)).sum();
        assert!((mean - 2.0 * (0.3 - 0.7)).abs() < 1e-13);
        // P(0) at small t: e^{-t}(1 + rl t^2 + ...)
        let t: f64 = 1e-3;
        assert!((free_walk_probability(0.3, 0.7, t, 0) - (-t).exp() * (1.0 + 0.21 * t * t + 0.0441 * t.powi(4) / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn margins() {
        assert_eq!(poisson_margin(1, 0.0, 1e-13), 1);
        assert!((poisson_tail(2.0, 0) - 1.0).abs() < 1e-15);
        let m = poisson_margin(6, 0.5, 1e-13);
        let tail: f64 = (m..60).map(|k| (-0.5f64).exp() * 0.5f64.powi(k as i32) / ln_gamma_int(k as f64).exp()).sum();
        assert!(6.0 * tail < 1e-13);
        let tail_before: f64 =
            (m - 1..60).map(|k| (-0.5f64).exp() * 0.5f64.powi(k as i32) / ln_gamma_int(k as f64).exp()).sum();
        assert!(6.0 * tail_before >= 1e-13);
    }

    #[test]
    fn step_oracle_small_time() {
        let params = ModelParams::new(0.3).unwrap();
        let o = StepOracle::new(&params, 0.0, 3, 3).unwrap();
        assert_eq!(o.current_distribution()[0], 1.0);
        // for tiny t only the particle at 1 can cross: P(N_0 >= 1) ~ q t
        let t = 1e-4;
        let o = StepOracle::new(&params, t, 3, 3).unwrap();
        let d = o.current_distribution();
        assert!((d[1] - 0.7 * t).abs() < 1e-7);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }
}
