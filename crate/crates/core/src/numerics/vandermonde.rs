//! Björck–Pereyra solvers for Vandermonde systems.

use crate::error::{Error, Result};

/// Largest supported system.
pub const MAX_VANDERMONDE: usize = 16;

fn validate(nodes: &[f64], rhs: &[f64]) -> Result<()> {
    if nodes.len() != rhs.len() {
        return Err(Error::Size(format!(
            "{} nodes but {} right-hand sides",
            nodes.len(),
            rhs.len()
        )));
    }
    if nodes.is_empty() || nodes.len() > MAX_VANDERMONDE {
        return Err(Error::Size(format!(
            "Vandermonde size must be in 1..={MAX_VANDERMONDE}, got {}",
            nodes.len()
        )));
    }
    for i in 0..nodes.len() {
        for j in 0..i {
            if nodes[i] == nodes[j] {
                return Err(Error::Singular(format!("duplicate node {} at positions {j} and {i}", nodes[i])));
            }
        }
    }
    Ok(())
}

/// Solves `sum_m x_m nodes_k^m = rhs_k` (polynomial interpolation: `x` are
/// the monomial coefficients of the interpolant).
pub fn vandermonde_solve(nodes: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    validate(nodes, rhs)?;
    let n = nodes.len();
    let mut c = rhs.to_vec();
    // Newton divided differences
    for k in 0..n - 1 {
        for i in (k + 1..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (nodes[i] - nodes[i - k - 1]);
        }
    }
    // Newton form to monomial form
    for k in (0..n - 1).rev() {
        for i in k..n - 1 {
            c[i] -= nodes[k] * c[i + 1];
        }
    }
    Ok(c)
}

/// Solves the transposed system `sum_m x_m nodes_m^k = rhs_k` (weights of a
/// discrete measure on `nodes` from its first moments).
pub fn vandermonde_moment_solve(nodes: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    validate(nodes, rhs)?;
    let n = nodes.len();
    let mut x = rhs.to_vec();
    for k in 0..n - 1 {
        for i in (k + 1..n).rev() {
            x[i] -= nodes[k] * x[i - 1];
        }
    }
    for k in (0..n - 1).rev() {
        for i in k + 1..n {
            x[i] /= nodes[i] - nodes[i - k - 1];
        }
        for i in k..n - 1 {
            x[i] -= x[i + 1];
        }
    }
    Ok(x)
}
