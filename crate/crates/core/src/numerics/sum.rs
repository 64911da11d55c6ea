//! Order-stable pairwise summation.
//!
//! Parallel reductions in this crate collect per-chunk partial sums into a
//! vector and combine them here, so results do not depend on the number of
//! worker threads.

use crate::C64;

const LEAF: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[C64]) -> C64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}
