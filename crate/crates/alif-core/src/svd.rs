//! Singular values by one-sided Jacobi orthogonalization.
//!
//! Rotations are applied to column pairs until all pairs are numerically
//! orthogonal; the singular values are the resulting column norms. Slow but
//! robustly accurate, which is what the Schatten-norm checks need — the
//! cross-validation oracle (eigenvalues of `A^T A`) lives in test code and
//! must stay an independent route.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::matrices::Mat;

const EPS: f64 = 2.220446049250313e-16;
const MAX_SWEEPS: usize = 60;

/// All `n` singular values, sorted descending.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    let n = a.n();
    if n == 0 {
        return Vec::new();
    }
    // Column-major copy: columns are the objects being rotated.
    let mut cols = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            cols[j * n + i] = a.get(i, j);
        }
    }

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0f64, 0.0f64, 0.0f64);
                for i in 0..n {
                    let x = cols[p * n + i];
                    let y = cols[q * n + i];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if fmath::abs(gamma) <= EPS * fmath::sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                // Jacobi rotation zeroing the (p, q) inner product.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + fmath::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + fmath::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let x = cols[p * n + i];
                    let y = cols[q * n + i];
                    cols[p * n + i] = c * x - s * y;
                    cols[q * n + i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..n {
                let x = cols[j * n + i];
                acc += x * x;
            }
            fmath::sqrt(acc)
        })
        .collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sigma
}
