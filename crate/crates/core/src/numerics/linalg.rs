//! Dense LU determinants and a symmetric eigenvalue routine.

use crate::C64;

/// Determinant of the row-major `n x n` matrix `a`, destroyed in place,
/// via LU with partial pivoting.
pub fn det_complex(a: &mut [C64], n: usize) -> C64 {
    assert_eq!(a.len(), n * n);
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for row in col + 1..n {
            let m = a[row * n + col].norm();
            if m > best {
                best = m;
                piv = row;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        let inv = 1.0 / d;
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row * n);
            let pivot_row = &top[col * n..col * n + n];
            let this = &mut bottom[..n];
            for j in col + 1..n {
                this[j] -= f * pivot_row[j];
            }
        }
    }
    det
}

/// Real counterpart of [`det_complex`].
pub fn det_real(a: &mut [f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[piv * n + col].abs() {
                piv = row;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col + 1..n {
                a[row * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

/// Eigenvalues of a real symmetric matrix (row-major), ascending, by cyclic
/// Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
