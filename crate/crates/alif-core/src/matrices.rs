//! Dense iteration matrices, their Toeplitz/diagonal factors, and band
//! truncations.
//!
//! The iteration matrix has entries `K[i][j] = k((i-j)/L(x_i)) / L(x_i)` on
//! the grid `x_i = i/(n-1)`. The kernel's unit support confines each row to
//! the band `|i-j| < L(x_i)`, so construction walks only the band; storage
//! stays dense (desk-scale sizes) with the band width kept as metadata.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::filters::{Filter, FilterDescriptor, LengthDescriptor, LengthFunction};
use crate::fmath;
use crate::rational::Ratio;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixError {
    /// Iteration matrices need at least a 2-point grid.
    SizeTooSmall,
    /// Rows of unequal length, or a non-square row set.
    NotSquare,
    /// Operand dimensions disagree.
    SizeMismatch,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            MatrixError::SizeTooSmall => "matrix size must be at least 2",
            MatrixError::NotSquare => "input rows do not form a square matrix",
            MatrixError::SizeMismatch => "operand sizes do not match",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MatrixError {}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat, MatrixError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare);
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(Mat { n, data })
    }

    pub fn from_diag(diag: &[f64]) -> Mat {
        let n = diag.len();
        let mut m = Mat::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if v.len() != self.n {
            return Err(MatrixError::SizeMismatch);
        }
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::SizeMismatch);
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Mat { n: self.n, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Largest absolute entry (used for scale-relative tolerances).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(fmath::abs(x)))
    }
}

/// The iteration matrix with its band metadata and construction provenance.
#[derive(Clone, Debug)]
pub struct IterationMatrix {
    pub mat: Mat,
    /// `ceil(sup L)`; entries with `|i-j| > band_halfwidth` vanish.
    pub band_halfwidth: usize,
    pub provenance: (FilterDescriptor, LengthDescriptor),
}

impl IterationMatrix {
    pub fn n(&self) -> usize {
        self.mat.n()
    }

    /// Matrix-vector product exploiting the band: `O(n * bandwidth)`.
    /// Entries outside the band are zero by construction.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, MatrixError> {
        let n = self.mat.n();
        if v.len() != n {
            return Err(MatrixError::SizeMismatch);
        }
        let bw = self.band_halfwidth;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let j_lo = i.saturating_sub(bw);
            let j_hi = (i + bw).min(n - 1);
            let row = self.mat.row(i);
            let mut acc = 0.0;
            for j in j_lo..=j_hi {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }
}

fn grid_point(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

/// Build `K_n` for the given kernel and window widths.
pub fn build_k(
    filter: &Filter,
    length: &LengthFunction,
    n: usize,
) -> Result<IterationMatrix, MatrixError> {
    if n < 2 {
        return Err(MatrixError::SizeTooSmall);
    }
    let band = fmath::ceil(length.upper_bound()) as usize;
    let mut mat = Mat::zeros(n);
    for i in 0..n {
        let li = length.evaluate(grid_point(i, n));
        let row_band = fmath::ceil(li) as usize;
        let j_lo = i.saturating_sub(row_band);
        let j_hi = (i + row_band).min(n - 1);
        for j in j_lo..=j_hi {
            let arg = (i as f64 - j as f64) / li;
            mat.set(i, j, filter.evaluate(arg) / li);
        }
    }
    Ok(IterationMatrix {
        mat,
        band_halfwidth: band,
        provenance: (filter.descriptor(), length.descriptor()),
    })
}

/// Exact-rational build of `K_n`, available when both the filter and the
/// length function expose exact evaluation. Row-major entries.
pub fn build_k_exact(filter: &Filter, length: &LengthFunction, n: usize) -> Option<Vec<Ratio>> {
    if n < 2 {
        return None;
    }
    let denom = (n - 1) as i128;
    let mut out = vec![Ratio::ZERO; n * n];
    for i in 0..n {
        let xi = Ratio::new(i as i128, denom);
        let li = length.evaluate_rational(&xi)?;
        for j in 0..n {
            let arg = Ratio::from_integer(i as i128 - j as i128) / li;
            let k = filter.evaluate_rational(&arg)?;
            out[i * n + j] = k / li;
        }
    }
    Some(out)
}

/// The n-th Toeplitz matrix with entry `(i, j) = coeffs[i - j]`
/// (missing shifts default to zero).
pub fn toeplitz_from_coeffs(coeffs: &BTreeMap<i64, f64>, n: usize) -> Mat {
    let mut mat = Mat::zeros(n);
    for (&shift, &c) in coeffs {
        if shift.unsigned_abs() as usize >= n || c == 0.0 {
            continue;
        }
        if shift >= 0 {
            let p = shift as usize;
            for i in p..n {
                mat.set(i, i - p, c);
            }
        } else {
            let p = (-shift) as usize;
            for i in 0..n - p {
                mat.set(i, i + p, c);
            }
        }
    }
    mat
}

/// Which uniform grid a diagonal sampling matrix uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingGrid {
    /// `a(i/n)`, `i = 1..n`.
    OverN,
    /// `a(i/(n-1))`, `i = 0..n-1` (the iteration-matrix grid).
    OverNMinus1,
}

/// Diagonal sampling matrix of `a` on the chosen grid.
pub fn diag_sampling<F: Fn(f64) -> f64>(a: F, n: usize, grid: SamplingGrid) -> Mat {
    let diag: Vec<f64> = match grid {
        SamplingGrid::OverN => (1..=n).map(|i| a(i as f64 / n as f64)).collect(),
        SamplingGrid::OverNMinus1 => {
            assert!(n >= 2, "the (n-1)-grid needs n >= 2");
            (0..n).map(|i| a(grid_point(i, n))).collect()
        }
    };
    Mat::from_diag(&diag)
}

/// One term of the shift decomposition: the diagonal of `f_p` sampled on the
/// iteration grid, attached to the Toeplitz shift `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorTerm {
    pub shift: i64,
    pub diagonal: Vec<f64>,
}

/// The decomposition of `K_n` into diagonal-times-shift terms:
/// summing `diag(f_p(x_i))` placed on the `i - j = p` band reproduces `K_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub terms: Vec<FactorTerm>,
    pub max_shift: usize,
    pub n: usize,
}

impl Factorization {
    /// Recompose the dense matrix from the terms.
    pub fn reconstruct(&self) -> Mat {
        let n = self.n;
        let mut mat = Mat::zeros(n);
        for term in &self.terms {
            let p = term.shift;
            for i in 0..n {
                let j = i as i64 - p;
                if (0..n as i64).contains(&j) {
                    let j = j as usize;
                    mat.set(i, j, mat.get(i, j) + term.diagonal[i]);
                }
            }
        }
        mat
    }
}

/// Decompose `K_n` into its diagonal-times-shift terms. Terms whose diagonal
/// vanishes identically (shifts at or beyond the kernel support) are dropped.
pub fn factorize_k(
    filter: &Filter,
    length: &LengthFunction,
    n: usize,
) -> Result<Factorization, MatrixError> {
    if n < 2 {
        return Err(MatrixError::SizeTooSmall);
    }
    let max_shift = fmath::ceil(length.upper_bound()) as usize;
    let mut terms = Vec::new();
    let p_cap = max_shift.min(n - 1) as i64;
    for p in -p_cap..=p_cap {
        let diagonal: Vec<f64> = (0..n)
            .map(|i| {
                let li = length.evaluate(grid_point(i, n));
                filter.evaluate(p as f64 / li) / li
            })
            .collect();
        if diagonal.iter().any(|&d| d != 0.0) {
            terms.push(FactorTerm { shift: p, diagonal });
        }
    }
    Ok(Factorization {
        terms,
        max_shift,
        n,
    })
}

/// `K_n` with every entry `|i-j| > m` zeroed (the band truncation).
pub fn build_k_truncated(
    filter: &Filter,
    length: &LengthFunction,
    n: usize,
    m: usize,
) -> Result<Mat, MatrixError> {
    let full = build_k(filter, length, n)?;
    Ok(truncate_band(&full.mat, m))
}

/// Zero all entries `|i-j| > m` of a dense matrix.
pub fn truncate_band(mat: &Mat, m: usize) -> Mat {
    let n = mat.n();
    let mut out = Mat::zeros(n);
    for i in 0..n {
        let j_lo = i.saturating_sub(m);
        let j_hi = (i + m).min(n - 1);
        for j in j_lo..=j_hi {
            out.set(i, j, mat.get(i, j));
        }
    }
    out
}
