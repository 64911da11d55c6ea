use serde::Serialize;

use crate::error::{Error, Result};

/// Largest weight accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_WEIGHT: usize = 20;

/// An integer partition `lambda = (lambda_1 >= lambda_2 >= ... > 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from weakly decreasing positive parts.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "partition parts must be positive and weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of nonzero parts `l(lambda)`.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `m[j]` = number of parts equal to `j`, for `j = 0..=largest part`
    /// (`m[0]` is always zero).
    pub fn multiplicities(&self) -> Vec<usize> {
        let top = self.parts.first().copied().unwrap_or(0);
        let mut m = vec![0; top + 1];
        for &p in &self.parts {
            m[p] += 1;
        }
        m
    }

    /// `prod_j m_j!`.
    pub fn multiplicity_factorial(&self) -> f64 {
        self.multiplicities()
            .iter()
            .map(|&m| (1..=m).map(|i| i as f64).product::<f64>())
            .product()
    }
}

/// All partitions of `k` in reverse-lexicographic order, `(k)` first and
/// `(1, ..., 1)` last.
pub fn enumerate_partitions(k: usize) -> Result<Vec<Partition>> {
    if k == 0 || k > MAX_PARTITION_WEIGHT {
        return Err(Error::Size(format!(
            "partition weight must lie in 1..={MAX_PARTITION_WEIGHT}, got {k}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fill(k, k, &mut current, &mut out);
    Ok(out)
}

fn fill(rest: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for part in (1..=max_part.min(rest)).rev() {
        current.push(part);
        fill(rest - part, part, current, out);
        current.pop();
    }
}
