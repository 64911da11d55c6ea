//! `q`-Pochhammer symbols and the `tau`-deformed factorial.

use crate::C64;

/// Truncation threshold for infinite products: factors with `|tau^j a|`
/// below this are treated as exactly one.
pub const INFINITE_PRODUCT_CUTOFF: f64 = 1e-16;

/// Number of factors in a `q`-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Length {
    Finite(usize),
    Infinite,
}

/// `(a; tau)_n = (1 - a)(1 - tau a) ... (1 - tau^{n-1} a)`.
///
/// For [`Length::Infinite`] the product stops once `|tau^j a|` drops below
/// [`INFINITE_PRODUCT_CUTOFF`].
pub fn q_pochhammer(a: C64, tau: f64, n: Length) -> C64 {
    debug_assert!(tau > 0.0 && tau < 1.0);
    let mut acc = C64::new(1.0, 0.0);
    let mut term = a;
    match n {
        Length::Finite(n) => {
            for _ in 0..n {
                acc *= 1.0 - term;
                term *= tau;
            }
        }
        Length::Infinite => {
            while term.norm() >= INFINITE_PRODUCT_CUTOFF {
                acc *= 1.0 - term;
                term *= tau;
            }
        }
    }
    acc
}

/// Real-argument convenience wrapper around [`q_pochhammer`].
pub fn q_pochhammer_real(a: f64, tau: f64, n: Length) -> f64 {
    debug_assert!(tau > 0.0 && tau < 1.0);
    let mut acc = 1.0;
    let mut term = a;
    match n {
        Length::Finite(n) => {
            for _ in 0..n {
                acc *= 1.0 - term;
                term *= tau;
            }
        }
        Length::Infinite => {
            while term.abs() >= INFINITE_PRODUCT_CUTOFF {
                acc *= 1.0 - term;
                term *= tau;
            }
        }
    }
    acc
}

/// `k_tau! = (tau; tau)_k / (1 - tau)^k`, which tends to `k!` as `tau -> 1`.
pub fn tau_factorial(k: usize, tau: f64) -> f64 {
    // product of (1 - tau^j)/(1 - tau) = 1 + tau + ... + tau^{j-1}
    let mut acc = 1.0;
    let mut tj = 1.0;
    let mut qint = 0.0;
    for _ in 0..k {
        qint += tj;
        tj *= tau;
        acc *= qint;
    }
    acc
}
