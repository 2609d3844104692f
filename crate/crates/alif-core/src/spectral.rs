//! Eigen/singular analysis of iteration matrices and the numerical witnesses
//! for the distribution claims attached to the sequence `{K_n}`: sorted
//! spectra versus symbol samples, band-truncation energy against its closed
//! bound, symmetry defects, zero-distribution decay, and oscillation
//! measures.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::eigen;
pub use crate::eigen::{EigenDecomposition, EigenError};
use crate::filters::{Filter, LengthFunction};
use crate::fmath;
use crate::matrices::{self, IterationMatrix, Mat, MatrixError};
use crate::svd;
use crate::symbol::Symbol;

/// Slack on the closed necessary-condition bound `|1 - lambda| <= 1`.
pub const NECESSARY_CONDITION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralError {
    Eigen(EigenError),
    Matrix(MatrixError),
    /// Schatten order below 1.
    InvalidOrder,
    EmptySizes,
    /// Shift must satisfy `1 <= m < n`.
    InvalidShift,
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::Eigen(e) => write!(f, "eigensolver: {e}"),
            SpectralError::Matrix(e) => write!(f, "matrix: {e}"),
            SpectralError::InvalidOrder => f.write_str("Schatten order must satisfy p >= 1"),
            SpectralError::EmptySizes => f.write_str("size list is empty"),
            SpectralError::InvalidShift => f.write_str("shift must satisfy 1 <= m < n"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpectralError {}

impl From<EigenError> for SpectralError {
    fn from(e: EigenError) -> Self {
        SpectralError::Eigen(e)
    }
}

impl From<MatrixError> for SpectralError {
    fn from(e: MatrixError) -> Self {
        SpectralError::Matrix(e)
    }
}

/// All eigenvalues, ordered by (real part, imaginary part).
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex64>, SpectralError> {
    Ok(eigen::eigenvalues(a)?)
}

/// Eigenvalues plus unit-norm right eigenvectors (for residual checks on
/// small matrices).
pub fn eigen_decomposition(a: &Mat) -> Result<EigenDecomposition, SpectralError> {
    Ok(eigen::decompose(a, true)?)
}

/// All singular values, sorted descending.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    svd::singular_values(a)
}

/// Schatten p-norm: the p-norm of the singular value vector
/// (`p = 2` is Frobenius, `p = inf` the spectral norm).
pub fn schatten_norm(a: &Mat, p: f64) -> Result<f64, SpectralError> {
    if !(p >= 1.0) {
        return Err(SpectralError::InvalidOrder);
    }
    let sigma = svd::singular_values(a);
    if sigma.is_empty() {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(sigma[0]);
    }
    if p == 1.0 {
        return Ok(sigma.iter().sum());
    }
    if p == 2.0 {
        return Ok(fmath::sqrt(sigma.iter().map(|s| s * s).sum()));
    }
    let sum: f64 = sigma.iter().map(|s| fmath::powf(*s, p)).sum();
    Ok(fmath::powf(sum, 1.0 / p))
}

/// Full spectral picture of one iteration matrix.
#[derive(Clone, Debug)]
pub struct SpectralReport {
    /// Eigenvalues sorted by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Singular values sorted descending.
    pub singular_values: Vec<f64>,
    /// `rho(I - K) = max |1 - lambda_i|`.
    pub spectral_radius_of_iteration: f64,
    /// `max |Im lambda_i|`.
    pub max_imag: f64,
    /// Whether `|1 - lambda_i| <= 1 + 1e-10` for every eigenvalue.
    pub necessary_condition_ok: bool,
}

pub fn spectral_report(k: &IterationMatrix) -> Result<SpectralReport, SpectralError> {
    let eigenvalues = eigen::eigenvalues(&k.mat)?;
    let singular_values = svd::singular_values(&k.mat);
    let one = Complex64::new(1.0, 0.0);
    let rho = eigenvalues
        .iter()
        .map(|z| (one - z).norm())
        .fold(0.0f64, f64::max);
    let max_imag = eigenvalues
        .iter()
        .map(|z| fmath::abs(z.im))
        .fold(0.0f64, f64::max);
    Ok(SpectralReport {
        eigenvalues,
        singular_values,
        spectral_radius_of_iteration: rho,
        max_imag,
        necessary_condition_ok: rho <= 1.0 + NECESSARY_CONDITION_TOL,
    })
}

/// Outcome of the necessary-condition check `|1 - lambda_i| <= 1`.
#[derive(Clone, Debug)]
pub struct NecessaryCondition {
    pub ok: bool,
    /// Index (in the sorted eigenvalue list) of the worst violator.
    pub worst_index: usize,
    /// The worst `|1 - lambda_i|`.
    pub worst_value: f64,
}

/// Check the inner-loop convergence prerequisite: every eigenvalue of `K`
/// must satisfy `|1 - lambda| <= 1` (else the iteration `(I-K)^m` diverges
/// for almost every start vector).
pub fn necessary_condition(k: &IterationMatrix) -> Result<NecessaryCondition, SpectralError> {
    let eigenvalues = eigen::eigenvalues(&k.mat)?;
    let one = Complex64::new(1.0, 0.0);
    let mut worst_index = 0;
    let mut worst_value = 0.0;
    for (i, z) in eigenvalues.iter().enumerate() {
        let v = (one - z).norm();
        if v > worst_value {
            worst_value = v;
            worst_index = i;
        }
    }
    Ok(NecessaryCondition {
        ok: worst_value <= 1.0 + NECESSARY_CONDITION_TOL,
        worst_index,
        worst_value,
    })
}

/// How closely the spectrum of a matrix tracks its symbol samples.
#[derive(Clone, Debug)]
pub struct DistributionCheck {
    pub n: usize,
    /// Mean absolute gap between sorted eigenvalue real parts and sorted
    /// symbol samples.
    pub discrepancy: f64,
    /// `max |Im lambda_i|`.
    pub max_imag: f64,
    /// Fraction of eigenvalues farther than `epsilon` from the sampled
    /// symbol range (distance in the complex plane to the real interval).
    pub outlier_fraction: f64,
    /// Secondary statistic: worst gap of `(1/n) sum F(lambda_i)` versus the
    /// grid average of `F(kappa)` over a small fixed family of Gaussians.
    pub test_function_gap: f64,
}

/// Compare the spectrum of `a` against `n` samples of the symbol.
/// `outlier_eps` defaults to 5% of the sampled symbol range width.
pub fn distribution_check(
    a: &Mat,
    sym: &Symbol,
    outlier_eps: Option<f64>,
) -> Result<DistributionCheck, SpectralError> {
    let n = a.n();
    let eigenvalues = eigen::eigenvalues(a)?;
    let samples = sym.sample_sorted(n);

    // Eigenvalues are already sorted by (re, im); their real parts are
    // nondecreasing only after re-sorting by real part alone.
    let mut re_sorted: Vec<f64> = eigenvalues.iter().map(|z| z.re).collect();
    re_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let discrepancy = re_sorted
        .iter()
        .zip(samples.iter())
        .map(|(a, b)| fmath::abs(a - b))
        .sum::<f64>()
        / n as f64;

    let max_imag = eigenvalues
        .iter()
        .map(|z| fmath::abs(z.im))
        .fold(0.0f64, f64::max);

    let lo = samples[0];
    let hi = samples[n - 1];
    let width = hi - lo;
    let eps = outlier_eps.unwrap_or(0.05 * width);
    let outliers = eigenvalues
        .iter()
        .filter(|z| {
            let dx = if z.re > hi {
                z.re - hi
            } else if z.re < lo {
                lo - z.re
            } else {
                0.0
            };
            fmath::hypot(dx, z.im) > eps
        })
        .count();

    // Fixed Gaussian test functions F_j(z) = exp(-j |z - c_j|^2) centred at
    // the quartiles of the sampled range.
    let mut test_function_gap = 0.0f64;
    for (j, frac) in [(1.0, 0.25), (2.0, 0.5), (4.0, 0.75)] {
        let c = lo + frac * width;
        let spectral_mean = eigenvalues
            .iter()
            .map(|z| fmath::exp(-j * ((z.re - c) * (z.re - c) + z.im * z.im)))
            .sum::<f64>()
            / n as f64;
        let symbol_mean = samples
            .iter()
            .map(|s| fmath::exp(-j * (s - c) * (s - c)))
            .sum::<f64>()
            / n as f64;
        test_function_gap = test_function_gap.max(fmath::abs(spectral_mean - symbol_mean));
    }

    Ok(DistributionCheck {
        n,
        discrepancy,
        max_imag,
        outlier_fraction: outliers as f64 / n as f64,
        test_function_gap,
    })
}

/// Empirical band-truncation energy against its closed bound.
#[derive(Clone, Copy, Debug)]
pub struct TruncationError {
    /// `(1/n) ||K_n - K_{n,m}||_F^2`, computed entrywise.
    pub empirical: f64,
    /// `2 ||k||_inf^2 sum_{p=m+1}^{P} 1/p^2` with `P` the band halfwidth
    /// (the tail beyond the band vanishes exactly).
    pub bound: f64,
}

/// Measure the energy removed by truncating `K_n` to the band `|i-j| <= m`,
/// and the a-priori bound it must respect. The guarantee
/// `empirical <= bound + 1e-12` is the inequality the truncation argument
/// rests on; it must hold for every configuration.
pub fn truncation_error(
    filter: &Filter,
    length: &LengthFunction,
    n: usize,
    m: usize,
) -> Result<TruncationError, SpectralError> {
    let k = matrices::build_k(filter, length, n)?;
    let nn = k.n();
    let mut removed = 0.0f64;
    for i in 0..nn {
        for j in 0..nn {
            if i.abs_diff(j) > m {
                let v = k.mat.get(i, j);
                removed += v * v;
            }
        }
    }
    let empirical = removed / nn as f64;

    let sup = filter.sup_abs();
    let mut tail = 0.0f64;
    for p in (m + 1)..=k.band_halfwidth {
        tail += 1.0 / (p as f64 * p as f64);
    }
    Ok(TruncationError {
        empirical,
        bound: 2.0 * sup * sup * tail,
    })
}

/// Scaled skew part `||A - A^T||_F / (2 sqrt n)` — the distance to the
/// nearest symmetric matrix, normalized the way the almost-Hermitian
/// arguments need it.
pub fn symmetry_defect(a: &Mat) -> f64 {
    let n = a.n();
    if n == 0 {
        return 0.0;
    }
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = a.get(i, j) - a.get(j, i);
            acc += d * d;
        }
    }
    fmath::sqrt(acc) / (2.0 * fmath::sqrt(n as f64))
}

/// Scaled Schatten norms `n^{-1/p} ||Z_n||_p` across a size sweep; decay
/// witnesses that the singular values of the sequence cluster at zero.
pub fn zero_distribution_witness<F: Fn(usize) -> Mat>(
    builder: F,
    sizes: &[usize],
    p: f64,
) -> Result<Vec<(usize, f64)>, SpectralError> {
    if sizes.is_empty() {
        return Err(SpectralError::EmptySizes);
    }
    if !(p >= 1.0) {
        return Err(SpectralError::InvalidOrder);
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let z = builder(n);
        let norm = schatten_norm(&z, p)?;
        let scale = if p.is_infinite() {
            1.0
        } else {
            fmath::powf(n as f64, -1.0 / p)
        };
        out.push((n, scale * norm));
    }
    Ok(out)
}

/// Grid approximation of the alpha-oscillation of `|a|` at `x`:
/// sup minus inf of `|a|` over `resolution` equispaced points of
/// `[x - alpha, x + alpha] ∩ [0, 1]` (endpoints included).
pub fn oscillation<F: Fn(f64) -> f64>(a: F, alpha: f64, x: f64, resolution: usize) -> f64 {
    assert!(alpha > 0.0, "radius must be positive");
    assert!((0.0..=1.0).contains(&x), "centre must lie in [0, 1]");
    assert!(resolution >= 2, "need at least 2 sample points");
    let lo = (x - alpha).max(0.0);
    let hi = (x + alpha).min(1.0);
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for i in 0..resolution {
        let t = lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
        let v = fmath::abs(a(t));
        sup = sup.max(v);
        inf = inf.min(v);
    }
    sup - inf
}

/// Mean-square defect of symmetrizing the diagonal-times-shift term at
/// shift `m`: `(1/n) sum_{i=0}^{n-1-m} (a(x_{i+m}) - a(x_i))^2` on the grid
/// `x_i = i/(n-1)`. Vanishing defect across a size sweep is the
/// almost-symmetry witness for Riemann-integrable `a`.
pub fn band_symmetrization_defect<F: Fn(f64) -> f64>(
    a: F,
    m: usize,
    n: usize,
) -> Result<f64, SpectralError> {
    if m < 1 || n <= m {
        return Err(SpectralError::InvalidShift);
    }
    let denom = (n - 1) as f64;
    let mut acc = 0.0f64;
    for i in 0..n - m {
        let d = a((i + m) as f64 / denom) - a(i as f64 / denom);
        acc += d * d;
    }
    Ok(acc / n as f64)
}
