//! Nyström evaluation of Fredholm determinants on contours.

use rayon::prelude::*;
use serde::Serialize;

use super::contour::Contour;
use super::linalg::det_complex;
use crate::error::{Error, Result};
use crate::C64;

/// A determinant at `N` nodes together with its value at `N/2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FredholmValue {
    pub value: C64,
    pub coarse: C64,
    /// `|value - coarse|`.
    pub error: f64,
    pub nodes: usize,
}

/// `det(I + scale K)` on `contour`, with the half-resolution value as an
/// error estimate.
pub fn fredholm_det<K>(kernel: K, contour: &Contour, scale: C64) -> Result<FredholmValue>
where
    K: Fn(C64, C64) -> C64 + Sync,
{
    let value = nystrom_det(&kernel, &contour.nodes, &contour.weights, scale)?;
    let coarse_contour = contour.halved()?;
    let coarse = nystrom_det(&kernel, &coarse_contour.nodes, &coarse_contour.weights, scale)?;
    Ok(FredholmValue {
        value,
        coarse,
        error: (value - coarse).norm(),
        nodes: contour.len(),
    })
}

/// `det[delta_ij + scale w_j K(z_i, z_j)]` for explicit nodes and weights.
pub fn nystrom_det<K>(kernel: &K, nodes: &[C64], weights: &[C64], scale: C64) -> Result<C64>
where
    K: Fn(C64, C64) -> C64 + Sync,
{
    let n = nodes.len();
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    a.par_chunks_mut(n.max(1)).enumerate().try_for_each(|(i, row)| {
        for j in 0..n {
            let k = kernel(nodes[i], nodes[j]);
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(Error::Evaluation { row: i, col: j });
            }
            row[j] = scale * weights[j] * k;
            if i == j {
                row[j] += 1.0;
            }
        }
        Ok(())
    })?;
    Ok(det_complex(&mut a, n))
}
