use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::StateSpace;
use crate::error::{Error, Result};
use crate::numerics::ModelParams;

/// Largest state space the generator builder accepts.
pub const STATE_BUDGET: u64 = 1 << 24;

/// Single-particle jump rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRates {
    pub right: f64,
    pub left: f64,
}

impl JumpRates {
    pub fn new(right: f64, left: f64) -> Result<Self> {
        if !(right >= 0.0 && left >= 0.0 && right.is_finite() && left.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "jump rates must be finite and nonnegative, got right={right} left={left}"
            )));
        }
        Ok(Self { right, left })
    }

    /// Rates of the given dynamics: forward jumps right at `p`, the adjoint
    /// has `p` and `q` swapped.
    pub fn of(params: &ModelParams, direction: Direction) -> Self {
        match direction {
            Direction::Forward => Self {
                right: params.p(),
                left: params.q(),
            },
            Direction::Adjoint => Self {
                right: params.q(),
                left: params.p(),
            },
        }
    }

    pub fn swapped(self) -> Self {
        Self {
            right: self.left,
            left: self.right,
        }
    }

    /// `right / left`.
    pub fn tau(&self) -> f64 {
        self.right / self.left
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Adjoint,
}

/// A state space with exclusion dynamics and closed (reflecting) ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub space: StateSpace,
    pub rates: JumpRates,
}

impl GeneratorSpec {
    pub fn new(space: StateSpace, direction: Direction, params: &ModelParams) -> Self {
        Self {
            space,
            rates: JumpRates::of(params, direction),
        }
    }

    pub fn with_rates(space: StateSpace, rates: JumpRates) -> Self {
        Self { space, rates }
    }
}

/// Sparse CTMC rate matrix: off-diagonal rates in CSR form plus the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    space: StateSpace,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl RateMatrix {
    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal `(column, rate)` pairs of a row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.diag[i] + self.row(i).map(|(_, v)| v).sum::<f64>()
    }

    /// `max_i |Q_ii|`.
    pub fn max_exit_rate(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }

    /// `out = Q v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, o)| {
            let mut s = self.diag[i] * v[i];
            for (j, r) in self.row(i) {
                s += r * v[j];
            }
            *o = s;
        });
    }

    pub fn transpose(&self) -> RateMatrix {
        let n = self.dim();
        let mut counts = vec![0usize; n + 1];
        for &c in &self.cols {
            counts[c as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0u32; self.cols.len()];
        let mut vals = vec![0.0; self.vals.len()];
        for i in 0..n {
            for (j, v) in self.row(i) {
                cols[next[j]] = i as u32;
                vals[next[j]] = v;
                next[j] += 1;
            }
        }
        RateMatrix {
            space: self.space,
            row_ptr: counts,
            cols,
            vals,
            diag: self.diag.clone(),
        }
    }

    /// Dense row-major copy (small spaces only).
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + i] = self.diag[i];
            for (j, v) in self.row(i) {
                d[i * n + j] += v;
            }
        }
        d
    }
}

/// Builds the exclusion-process rate matrix on an enumerated state space.
pub fn build_generator(spec: &GeneratorSpec) -> Result<RateMatrix> {
    let space = spec.space;
    space.validate()?;
    let size = space.size();
    if size > STATE_BUDGET {
        return Err(Error::Size(format!("{size} states exceed the budget of {STATE_BUDGET}")));
    }
    let n = size as usize;
    let sites = space.sites();
    let JumpRates { right, left } = spec.rates;
    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let mask = space.mask(i);
            let mut out = Vec::new();
            let mut m = mask;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                if b > 0 && mask >> (b - 1) & 1 == 0 && left > 0.0 {
                    let to = mask ^ (1 << b) ^ (1 << (b - 1));
                    out.push((space.index(to) as u32, left));
                }
                if b + 1 < sites && mask >> (b + 1) & 1 == 0 && right > 0.0 {
                    let to = mask ^ (1 << b) ^ (1 << (b + 1));
                    out.push((space.index(to) as u32, right));
                }
            }
            out
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut diag = Vec::with_capacity(n);
    for row in rows {
        let mut total = 0.0;
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
            total += v;
        }
        diag.push(-total);
        row_ptr.push(cols.len());
    }
    Ok(RateMatrix {
        space,
        row_ptr,
        cols,
        vals,
        diag,
    })
}
