//! Product-grid sums for k-fold quadratures.

use rayon::prelude::*;

use super::sum::pairwise_sum_c;
use crate::C64;

/// `sum f(i_0, ..., i_{k-1})` over the grid `prod_j [0, sizes[j])`.
///
/// The leading index is distributed over threads; each slice is summed in a
/// fixed order and the slices are combined pairwise, so the result does not
/// depend on the thread count.
pub fn tensor_sum<F>(sizes: &[usize], f: F) -> C64
where
    F: Fn(&[usize]) -> C64 + Sync,
{
    if sizes.is_empty() {
        return f(&[]);
    }
    if sizes.contains(&0) {
        return C64::new(0.0, 0.0);
    }
    let partial: Vec<C64> = (0..sizes[0])
        .into_par_iter()
        .map(|i0| {
            let mut idx = vec![0usize; sizes.len()];
            idx[0] = i0;
            let mut acc = C64::new(0.0, 0.0);
            loop {
                acc += f(&idx);
                // odometer over the trailing indices
                let mut j = sizes.len() - 1;
                loop {
                    if j == 0 {
                        return acc;
                    }
                    idx[j] += 1;
                    if idx[j] < sizes[j] {
                        break;
                    }
                    idx[j] = 0;
                    j -= 1;
                }
            }
        })
        .collect();
    pairwise_sum_c(&partial)
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sum_counts_points() {
        let s = tensor_sum(&[3, 4, 5], |_| C64::new(1.0, 0.0));
        assert_eq!(s, C64::new(60.0, 0.0));
        let s = tensor_sum(&[3, 4], |i| C64::new((i[0] * 10 + i[1]) as f64, 0.0));
        let expect: f64 = (0..3).flat_map(|a| (0..4).map(move |b| (a * 10 + b) as f64)).sum();
        assert_eq!(s.re, expect);
        assert_eq!(tensor_sum(&[], |_| C64::new(2.0, 0.0)), C64::new(2.0, 0.0));
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(1), vec![vec![0]]);
        let p3 = permutations(3);
        assert_eq!(p3.len(), 6);
        assert_eq!(p3[0], vec![0, 1, 2]);
        assert_eq!(p3[5], vec![2, 1, 0]);
        assert_eq!(permutations(5).len(), 120);
    }
}
