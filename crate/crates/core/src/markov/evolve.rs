use super::generator::RateMatrix;
use crate::error::{Error, Result};

/// Poisson tail mass at which uniformization stops.
pub const POISSON_TAIL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evolution {
    /// `v -> e^{tQ^T} v`: `v` is a distribution (row vector).
    Distribution,
    /// `v -> e^{tQ} v`: `v` is a function on states.
    Observable,
}

/// Matrix exponential action by uniformization.
///
/// With `Lambda = max |Q_ii|` and `P = I + Q/Lambda`, returns
/// `sum_n Pois(Lambda t; n) P^n v`, truncated once the remaining Poisson
/// mass drops below [`POISSON_TAIL`].
pub fn evolve(matrix: &RateMatrix, v: &[f64], t: f64, mode: Evolution) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and nonnegative, got {t}")));
    }
    if v.len() != matrix.dim() {
        return Err(Error::Size(format!(
            "vector of length {} for a {}-state generator",
            v.len(),
            matrix.dim()
        )));
    }
    let lambda = matrix.max_exit_rate();
    if t == 0.0 || lambda == 0.0 {
        return Ok(v.to_vec());
    }
    let transposed;
    let op = match mode {
        Evolution::Observable => matrix,
        Evolution::Distribution => {
            transposed = matrix.transpose();
            &transposed
        }
    };
    let mean = lambda * t;
    let mut term = v.to_vec();
    let mut scratch = vec![0.0; v.len()];
    let mut out = vec![0.0; v.len()];
    let mut cumulative = 0.0;
    let mut n = 0usize;
    loop {
        let log_w = -mean + n as f64 * mean.ln() - ln_factorial(n);
        let w = log_w.exp();
        cumulative += w;
        for (o, x) in out.iter_mut().zip(&term) {
            *o += w * x;
        }
        if (n as f64 > mean && 1.0 - cumulative < POISSON_TAIL) || n > 10_000_000 {
            break;
        }
        op.apply(&term, &mut scratch);
        for (x, s) in term.iter_mut().zip(&scratch) {
            *x += s / lambda;
        }
        n += 1;
    }
    Ok(out)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{build_generator, free_walk_probability, Direction, GeneratorSpec, StateSpace};
    use crate::ModelParams;

    #[test]
    fn zero_time_is_identity() {
        let space = StateSpace::Occupation { xmin: 0, len: 4 };
        let q = build_generator(&GeneratorSpec::new(space, Direction::Forward, &ModelParams::new(0.3).unwrap())).unwrap();
        let v: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
        assert_eq!(evolve(&q, &v, 0.0, Evolution::Observable).unwrap(), v);
    }

    #[test]
    fn stays_on_simplex() {
        let space = StateSpace::Occupation { xmin: 0, len: 8 };
        let q = build_generator(&GeneratorSpec::new(space, Direction::Forward, &ModelParams::new(0.2).unwrap())).unwrap();
        let mut v = vec![0.0; 256];
        v[0b1100_1010] = 1.0;
        let d = evolve(&q, &v, 2.5, Evolution::Distribution).unwrap();
        assert!(d.iter().all(|&x| x >= -1e-12));
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // particle number is conserved
        for (i, x) in d.iter().enumerate() {
            if (i as u64).count_ones() != 4 {
                assert!(x.abs() < 1e-300);
            }
        }
    }

    #[test]
    fn single_particle_free_walk() {
        let params = ModelParams::new(0.3).unwrap();
        let space = StateSpace::Particles { xmin: -4, xmax: 4, count: 1 };
        let q = build_generator(&GeneratorSpec::new(space, Direction::Forward, &params)).unwrap();
        let mut v = vec![0.0; 9];
        v[space.index(1 << 4)] = 1.0;
        let t = 0.5;
        let d = evolve(&q, &v, t, Evolution::Distribution).unwrap();
        // boundary sites are reachable with probability ~ P(Pois(0.5) >= 4)
        for x in -2i64..=2 {
            let exact = free_walk_probability(0.3, 0.7, t, x);
            let got = d[space.index(1 << (x + 4))];
            assert!((got - exact).abs() < 5e-4, "x={x}: {got} vs {exact}");
        }
        let exact0 = free_walk_probability(0.3, 0.7, t, 0);
        assert!((d[space.index(1 << 4)] - exact0).abs() < 1e-5);
    }
}
