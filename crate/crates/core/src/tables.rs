//! Tabulated moments and distributions with the route that produced them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The computational route behind a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Partition expansion of the moment formula.
    Partition,
    /// Nested-contour moment formula.
    Nested,
    /// Event-driven simulation.
    MonteCarlo,
    /// Exact finite-window matrix exponential.
    Oracle,
    /// Moments from the partition route, inverted to masses.
    Duality,
    /// Fredholm determinant with the coordinate-approach kernel.
    Tw,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Partition => "partition",
            Method::Nested => "nested",
            Method::MonteCarlo => "monte-carlo",
            Method::Oracle => "oracle",
            Method::Duality => "duality",
            Method::Tw => "tw",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One moment `E[tau^{k N_0(t)}]` with its error estimate (a standard
/// error for simulation, a quadrature error otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub k: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub method: Method,
    pub t: f64,
    pub entries: Vec<MomentEntry>,
}

impl MomentTable {
    pub fn value(&self, k: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.k == k).map(|e| e.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// Masses below this are treated as genuinely negative.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-8;

/// `P(N_0(t) = m)` for `m = 0..masses.len()`, plus the mass beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub method: Method,
    pub t: f64,
    pub masses: Vec<f64>,
    pub errors: Vec<f64>,
    /// Mass on `m >= masses.len()`.
    pub tail: f64,
    /// Whether slightly negative masses were clipped to zero.
    pub clipped: bool,
}

impl DistributionTable {
    /// Validates and clips: masses must be `>= -1e-8` and the total
    /// including the tail within `1e-6` of one.
    pub fn new(method: Method, t: f64, masses: Vec<f64>, errors: Vec<f64>, tail: f64) -> Result<Self> {
        if masses.len() != errors.len() {
            return Err(Error::Size("masses and errors differ in length".into()));
        }
        let mut clipped = false;
        let mut masses = masses;
        for (m, x) in masses.iter_mut().enumerate() {
            if *x < -NEGATIVE_MASS_TOLERANCE || !x.is_finite() {
                return Err(Error::Inversion(format!("mass at m={m} is {x:e}")));
            }
            if *x < 0.0 {
                *x = 0.0;
                clipped = true;
            }
        }
        let total: f64 = masses.iter().sum::<f64>() + tail;
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Inversion(format!("total mass {total} differs from 1")));
        }
        Ok(Self {
            method,
            t,
            masses,
            errors,
            tail,
            clipped,
        })
    }

    pub fn mass(&self, m: usize) -> f64 {
        self.masses.get(m).copied().unwrap_or(0.0)
    }

    /// `P(N_0 <= m)`.
    pub fn cdf(&self, m: usize) -> f64 {
        self.masses.iter().take(m + 1).sum()
    }

    /// Total-variation distance over the common support, counting the
    /// unresolved tails as one extra cell.
    pub fn total_variation(&self, other: &DistributionTable) -> f64 {
        let n = self.masses.len().max(other.masses.len());
        let mut d: f64 = (0..n).map(|m| (self.mass(m) - other.mass(m)).abs()).sum();
        d += (self.tail - other.tail).abs();
        0.5 * d
    }
}
