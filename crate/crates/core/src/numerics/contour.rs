//! Closed and infinite contours with quadrature nodes.
//!
//! Weights carry the `1/(2 pi i)` factor, so `sum w_i f(z_i)` approximates
//! `(1/(2 pi i)) \oint f(z) dz` directly.

use std::f64::consts::PI;

use serde::Serialize;

use super::gauss::{composite_gauss_legendre, gauss_legendre};
use crate::error::{Error, Result};
use crate::C64;

/// Nodes per Gauss–Legendre panel on vertical lines.
const LINE_PANEL: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ContourShape {
    /// Counterclockwise circle, trapezoid rule in the angle.
    Circle { center: C64, radius: f64 },
    /// Counterclockwise rectangle with circular corners; Gauss–Legendre on
    /// each of the four edges and four arcs.
    RoundedRectangle {
        lower_left: C64,
        upper_right: C64,
        corner_radius: f64,
    },
    /// Upward line `real_part + i[-half_height, half_height]`.
    VerticalLine { real_part: f64, half_height: f64 },
    /// Disjoint union; nodes are split evenly between the parts.
    Union(Vec<ContourShape>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Contour {
    pub shape: ContourShape,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `(1/(2 pi i)) \int f`.
    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> C64 {
        let terms: Vec<C64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .collect();
        super::sum::pairwise_sum_c(&terms)
    }

    /// The same shape at half the node count.
    pub fn halved(&self) -> Result<Contour> {
        build_contour(&self.shape, self.len() / 2)
    }

    /// The same shape at twice the node count.
    pub fn doubled(&self) -> Result<Contour> {
        build_contour(&self.shape, self.len() * 2)
    }
}

/// Discretizes `shape` with `node_count` nodes (a power of two, at least 8).
pub fn build_contour(shape: &ContourShape, node_count: usize) -> Result<Contour> {
    if node_count < 8 || !node_count.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "contour node count must be a power of two >= 8, got {node_count}"
        )));
    }
    let (nodes, weights) = discretize(shape, node_count)?;
    Ok(Contour {
        shape: shape.clone(),
        nodes,
        weights,
    })
}

fn discretize(shape: &ContourShape, n: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    match *shape {
        ContourShape::Circle { center, radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
            }
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for j in 0..n {
                let e = C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
                nodes.push(center + e);
                // z'(theta) dtheta / (2 pi i) = i e dtheta / (2 pi i)
                weights.push(e / n as f64);
            }
            Ok((nodes, weights))
        }
        ContourShape::RoundedRectangle {
            lower_left,
            upper_right,
            corner_radius,
        } => rounded_rectangle(lower_left, upper_right, corner_radius, n),
        ContourShape::VerticalLine {
            real_part,
            half_height,
        } => {
            if !(half_height > 0.0 && half_height.is_finite()) {
                return Err(Error::Geometry(format!(
                    "line truncation must be positive, got {half_height}"
                )));
            }
            let per = LINE_PANEL.min(n);
            let (ys, ws) = composite_gauss_legendre(-half_height, half_height, n / per, per);
            let nodes = ys.iter().map(|&y| C64::new(real_part, y)).collect();
            // dz = i dy, so dz / (2 pi i) = dy / (2 pi)
            let weights = ws.iter().map(|&w| C64::new(w / (2.0 * PI), 0.0)).collect();
            Ok((nodes, weights))
        }
        ContourShape::Union(ref parts) => {
            if parts.is_empty() || n % parts.len() != 0 || n / parts.len() < 8 {
                return Err(Error::InvalidParameter(format!(
                    "cannot split {n} nodes evenly over {} contour parts",
                    parts.len()
                )));
            }
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for part in parts {
                let (z, w) = discretize(part, n / parts.len())?;
                nodes.extend(z);
                weights.extend(w);
            }
            Ok((nodes, weights))
        }
    }
}

fn rounded_rectangle(ll: C64, ur: C64, rc: f64, n: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    let (w, h) = (ur.re - ll.re, ur.im - ll.im);
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::Geometry(format!("rectangle has non-positive extent {w} x {h}")));
    }
    if !(rc > 0.0 && 2.0 * rc < w.min(h)) {
        return Err(Error::Geometry(format!(
            "corner radius {rc} must be positive and below half the shorter side"
        )));
    }
    let per = n / 8;
    let (x, gw) = gauss_legendre(per);
    let i = C64::i();
    let corners = [
        (C64::new(ur.re - rc, ll.im + rc), -0.5 * PI),
        (C64::new(ur.re - rc, ur.im - rc), 0.0),
        (C64::new(ll.re + rc, ur.im - rc), 0.5 * PI),
        (C64::new(ll.re + rc, ll.im + rc), PI),
    ];
    // bottom edge, then counterclockwise: corner, edge, corner, ...
    let straight = [
        (C64::new(ll.re + rc, ll.im), C64::new(ur.re - rc, ll.im)),
        (C64::new(ur.re, ll.im + rc), C64::new(ur.re, ur.im - rc)),
        (C64::new(ur.re - rc, ur.im), C64::new(ll.re + rc, ur.im)),
        (C64::new(ll.re, ur.im - rc), C64::new(ll.re, ll.im + rc)),
    ];
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&(a, b), &(centre, start)) in straight.iter().zip(&corners) {
        for (xi, wi) in x.iter().zip(&gw) {
            nodes.push(a + (b - a) * 0.5 * (xi + 1.0));
            weights.push((b - a) * 0.5 * wi / (2.0 * PI * i));
        }
        for (xi, wi) in x.iter().zip(&gw) {
            let e = C64::from_polar(rc, start + 0.25 * PI * (xi + 1.0));
            // dz = i e dtheta with dtheta = (pi/4) dx
            nodes.push(centre + e);
            weights.push(e * 0.25 * PI * wi / (2.0 * PI));
        }
    }
    Ok((nodes, weights))
}
