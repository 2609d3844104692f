//! An exact 3x3 fixture showing that the necessary condition on the symbol
//! is not sufficient for inner-loop convergence.
//!
//! A tabulated piecewise-linear kernel and a three-valued step width induce
//! the iteration matrix
//!
//! ```text
//!         | 0.70  0.48  0.15 |
//!   K_3 = | 0.34  0.38  0.34 |
//!         | 0.24  0.41  0.49 |
//! ```
//!
//! whose rows are the coefficients of nonnegative trigonometric polynomials
//! bounded by 2 (so the symbol stays inside `[0, 2]`), yet `det K_3 < 0`
//! forces a negative eigenvalue and `rho(I - K_3) > 1`: the inner loop
//! diverges for almost every start vector. All table values are exact
//! rationals; the matrix is reproduced bit-for-bit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::alif::{self, SiftStatus, SiftingConfig};
use crate::filters::{Filter, LengthFunction};
use crate::fmath;
use crate::matrices::{self, IterationMatrix};
use crate::rational::{self, Ratio};
use crate::rng::SplitMix64;
use crate::spectral;
use crate::symbol::{f123_polynomials, Symbol, SymbolRange};

/// Kernel value at the origin, `k(0) = 21/10`.
pub fn kernel_origin_value() -> Ratio {
    Ratio::new(21, 10)
}

/// The eleven tabulated kernel conditions `(x, k(x))`, exact.
pub fn kernel_node_table() -> Vec<(Ratio, Ratio)> {
    let r = Ratio::new;
    vec![
        (r(19, 105), r(357, 190)),
        (r(7, 30), r(123, 70)),
        (r(1, 3), r(36, 25)),
        (r(38, 105), r(651, 475)),
        (r(7, 15), r(36, 35)),
        (r(19, 35), r(378, 475)),
        (r(2, 3), r(9, 20)),
        (r(7, 10), r(27, 70)),
        (r(76, 105), r(651, 1900)),
        (r(19, 21), r(42, 475)),
        (r(14, 15), r(9, 140)),
    ]
}

/// The three step widths `L(0) = 3`, `L(1/2) = 105/19`, `L(1) = 30/7`.
pub fn width_values() -> [Ratio; 3] {
    [Ratio::new(3, 1), Ratio::new(105, 19), Ratio::new(30, 7)]
}

/// The target matrix, exact, row-major.
pub fn expected_matrix() -> [Ratio; 9] {
    let r = Ratio::new;
    [
        r(7, 10),
        r(12, 25),
        r(3, 20),
        r(17, 50),
        r(19, 50),
        r(17, 50),
        r(6, 25),
        r(41, 100),
        r(49, 100),
    ]
}

/// Exact determinant of the target matrix: `-81/100000`.
pub fn expected_determinant() -> Ratio {
    Ratio::new(-81, 100_000)
}

/// The assembled fixture.
#[derive(Clone, Debug)]
pub struct CounterexampleBundle {
    /// The tabulated kernel (mass above 1 by construction).
    pub filter_raw: Filter,
    /// The same kernel rescaled to unit mass.
    pub filter_normalized: Filter,
    /// Step widths with breakpoints at 1/4 and 3/4 (any placement isolating
    /// the three grid points works; this one is fixed here).
    pub length: LengthFunction,
    /// `K_3` built through the ordinary float path.
    pub k3: IterationMatrix,
    /// `K_3` built through the exact rational path, row-major.
    pub k3_exact: Vec<Ratio>,
}

/// Build the fixture: the piecewise-linear kernel through `(0, 21/10)`, the
/// eleven table nodes and `(1, 0)`, plus the three-valued step width.
pub fn build() -> CounterexampleBundle {
    let mut nodes = vec![(Ratio::ZERO, kernel_origin_value())];
    nodes.extend(kernel_node_table());
    let filter_raw = Filter::piecewise_linear_exact(&nodes).expect("fixture nodes are valid");
    let filter_normalized = filter_raw.normalized().expect("fixture mass is positive");

    let [l0, l_half, l1] = width_values();
    let length =
        LengthFunction::step_exact(&[Ratio::new(1, 4), Ratio::new(3, 4)], &[l0, l_half, l1])
            .expect("fixture widths are valid");

    let k3 = matrices::build_k(&filter_raw, &length, 3).expect("3x3 build");
    let k3_exact = matrices::build_k_exact(&filter_raw, &length, 3).expect("fixture is exact");

    CounterexampleBundle {
        filter_raw,
        filter_normalized,
        length,
        k3,
        k3_exact,
    }
}

impl CounterexampleBundle {
    /// The symbol attached to the raw (unnormalized) kernel.
    pub fn symbol_raw(&self) -> Symbol {
        Symbol::new(self.filter_raw.clone(), self.length.clone())
    }

    /// The symbol attached to the unit-mass kernel.
    pub fn symbol_normalized(&self) -> Symbol {
        Symbol::new(self.filter_normalized.clone(), self.length.clone())
    }

    /// Norm trajectory of the divergent iteration `v <- (I - K_3) v` from
    /// the given start vector: entry `m-1` holds `||(I - K_3)^m r||`.
    pub fn iteration_growth_curve(&self, start: &[f64; 3], m_iters: usize) -> GrowthCurve {
        let mut v = start.to_vec();
        let mut norms = Vec::with_capacity(m_iters);
        for _ in 0..m_iters {
            let kv = self.k3.mat.matvec(&v).expect("3x3");
            for i in 0..3 {
                v[i] -= kv[i];
            }
            norms.push(fmath::sqrt(v.iter().map(|x| x * x).sum()));
        }
        let tail_log_rate = tail_log_rate(&norms);
        GrowthCurve {
            norms,
            tail_log_rate,
        }
    }

    /// Growth curve from a seeded random start.
    pub fn seeded_growth_curve(&self, seed: u64, m_iters: usize) -> GrowthCurve {
        let mut rng = SplitMix64::new(seed);
        let start = [
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
        ];
        self.iteration_growth_curve(&start, m_iters)
    }
}

/// Norms of the iterated residual and the fitted asymptotic log-growth.
#[derive(Clone, Debug)]
pub struct GrowthCurve {
    pub norms: Vec<f64>,
    /// Per-step log-growth measured over the trailing half of the curve
    /// (the transient from the contracting eigenvalues is dead by then).
    pub tail_log_rate: f64,
}

fn tail_log_rate(norms: &[f64]) -> f64 {
    let m = norms.len();
    if m < 2 {
        return 0.0;
    }
    let half = m / 2;
    let (a, b) = (norms[half - 1], norms[m - 1]);
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    (fmath::ln(b) - fmath::ln(a)) / (m - half) as f64
}

/// The verification record: every claim of the fixture, checked, with the
/// measured values kept alongside the flags.
#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    /// Exact: the rational build equals the target matrix entry-for-entry.
    pub matrix_exact_ok: bool,
    /// Float build within 1e-15 of the exact entries.
    pub matrix_float_error: f64,
    pub matrix_float_ok: bool,
    /// `det = -81/100000`, exact and float.
    pub determinant: f64,
    pub determinant_ok: bool,
    /// Most negative eigenvalue, expected near -0.0018.
    pub min_eigenvalue: f64,
    pub min_eigenvalue_ok: bool,
    /// `rho(I - K_3)`, expected near 1.0018.
    pub iteration_radius: f64,
    pub iteration_radius_ok: bool,
    /// Symbol range of the raw kernel: must stay inside [0, 2] with the
    /// maximum attained (at theta = 0).
    pub raw_symbol: SymbolRange,
    pub raw_symbol_ok: bool,
    /// Symbol maximum of the unit-mass kernel: `2 / ||k||_1 < 2`.
    pub normalized_symbol_max: f64,
    pub normalized_symbol_ok: bool,
    /// The inner loop on a seeded random start must report divergence.
    pub sift_status: SiftStatus,
    pub sift_iterations: usize,
    pub sift_ok: bool,
    /// The three row polynomials: nonnegative on a dense grid, maxima
    /// (1.96, 2, 2) at theta = 0.
    pub polynomials_nonnegative: bool,
    pub polynomial_maxima_ok: bool,
}

impl CounterexampleReport {
    pub fn all_ok(&self) -> bool {
        self.matrix_exact_ok
            && self.matrix_float_ok
            && self.determinant_ok
            && self.min_eigenvalue_ok
            && self.iteration_radius_ok
            && self.raw_symbol_ok
            && self.normalized_symbol_ok
            && self.sift_ok
            && self.polynomials_nonnegative
            && self.polynomial_maxima_ok
    }
}

/// Verify every claim of the fixture. Failures are reported, not panicked.
pub fn verify(bundle: &CounterexampleBundle) -> CounterexampleReport {
    let expected = expected_matrix();

    let matrix_exact_ok = bundle.k3_exact.as_slice() == expected.as_slice();
    let matrix_float_error = (0..9)
        .map(|i| fmath::abs(bundle.k3.mat.data()[i] - expected[i].to_f64()))
        .fold(0.0f64, f64::max);
    let matrix_float_ok = matrix_float_error <= 1e-15;

    let det_exact = rational::determinant(&bundle.k3_exact, 3);
    let determinant = det_exact.to_f64();
    let determinant_ok =
        det_exact == expected_determinant() && fmath::abs(determinant - (-0.00081)) <= 1e-12;

    // Spectrum of the 3x3: one negative real eigenvalue drives divergence.
    let eigenvalues = spectral::eigenvalues(&bundle.k3.mat).expect("3x3 spectrum");
    let min_eigenvalue = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let min_eigenvalue_ok = fmath::abs(min_eigenvalue - (-0.0018)) <= 2e-4;

    let one = Complex64::new(1.0, 0.0);
    let iteration_radius = eigenvalues
        .iter()
        .map(|z| (one - z).norm())
        .fold(0.0f64, f64::max);
    let iteration_radius_ok = fmath::abs(iteration_radius - 1.0018) <= 2e-4;

    let raw_symbol = bundle.symbol_raw().range(301, 2001);
    let raw_symbol_ok = raw_symbol.condition_ok
        && fmath::abs(raw_symbol.max - 2.0) <= 1e-12
        && fmath::abs(raw_symbol.argmax.1) <= 1e-12;

    let mass = bundle.filter_raw.l1_mass();
    let normalized_range = bundle.symbol_normalized().range(301, 2001);
    let normalized_symbol_max = normalized_range.max;
    let normalized_symbol_ok = normalized_range.condition_ok
        && normalized_symbol_max < 2.0
        && fmath::abs(normalized_symbol_max - 2.0 / mass) <= 1e-10;

    // Seeded divergence of the inner loop.
    let mut rng = SplitMix64::new(42);
    let start = rng.signal(3);
    let cfg = SiftingConfig {
        max_inner: 30_000,
        ..SiftingConfig::default()
    };
    let sifted = alif::sift(&start, &bundle.k3, &cfg).expect("sizes match");
    let sift_ok = sifted.telemetry.status == SiftStatus::Diverged;

    // Row polynomials on a dense theta grid.
    let mut polynomials_nonnegative = true;
    let mut max1 = f64::NEG_INFINITY;
    let mut max2 = f64::NEG_INFINITY;
    let mut max3 = f64::NEG_INFINITY;
    let grid = 100_000usize;
    for j in 0..grid {
        let theta =
            -core::f64::consts::PI + 2.0 * core::f64::consts::PI * j as f64 / (grid - 1) as f64;
        let (f1, f2, f3) = f123_polynomials(theta);
        if f1 < -1e-12 || f2 < -1e-12 || f3 < -1e-12 {
            polynomials_nonnegative = false;
        }
        max1 = max1.max(f1);
        max2 = max2.max(f2);
        max3 = max3.max(f3);
    }
    let (f1_0, f2_0, f3_0) = f123_polynomials(0.0);
    let polynomial_maxima_ok = f1_0 == 1.96
        && f2_0 == 2.0
        && f3_0 == 2.0
        && max1 <= f1_0 + 1e-12
        && max2 <= f2_0 + 1e-12
        && max3 <= f3_0 + 1e-12;

    CounterexampleReport {
        matrix_exact_ok,
        matrix_float_error,
        matrix_float_ok,
        determinant,
        determinant_ok,
        min_eigenvalue,
        min_eigenvalue_ok,
        iteration_radius,
        iteration_radius_ok,
        raw_symbol,
        raw_symbol_ok,
        normalized_symbol_max,
        normalized_symbol_ok,
        sift_status: sifted.telemetry.status,
        sift_iterations: sifted.telemetry.iterations,
        sift_ok,
        polynomials_nonnegative,
        polynomial_maxima_ok,
    }
}
