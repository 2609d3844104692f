//! The spectral symbol `kappa(x, theta)` of the iteration-matrix sequence.
//!
//! For each position `x`, the symbol is the finite Fourier sum of the row
//! coefficients: `kappa(x, theta) = sum_p f_p(x) e^{ip theta}` with
//! `f_p(x) = k(p / L(x)) / L(x)`. Since the kernel is even the coefficients
//! are symmetric and the symbol is real; evaluation uses the cosine form
//! `f_0(x) + 2 sum_{p >= 1} f_p(x) cos(p theta)`.
//!
//! The asymptotic eigenvalue picture of the matrix sequence is governed by
//! the range of the symbol: values escaping `[0, 2]` flag a diverging
//! inner loop.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::filters::{Filter, LengthFunction};
use crate::fmath;
use crate::rational::Ratio;

/// Tolerance for the closed bound `0 <= kappa <= 2` (boundary attainment at
/// `theta = 0` must pass).
pub const CONDITION_TOL: f64 = 1e-12;

/// The evaluable symbol attached to a (filter, length) pair.
#[derive(Clone, Debug)]
pub struct Symbol {
    filter: Filter,
    length: LengthFunction,
    max_shift: usize,
}

/// Extrema of the symbol over a tensor grid, and whether the necessary
/// convergence condition `0 <= kappa <= 2` holds there.
#[derive(Clone, Debug)]
pub struct SymbolRange {
    pub min: f64,
    pub max: f64,
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
    pub condition_ok: bool,
}

impl Symbol {
    pub fn new(filter: Filter, length: LengthFunction) -> Symbol {
        let max_shift = fmath::ceil(length.upper_bound()) as usize;
        Symbol {
            filter,
            length,
            max_shift,
        }
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn length(&self) -> &LengthFunction {
        &self.length
    }

    /// Hard cap on the Fourier shifts: `f_p` vanishes for `|p| > ceil(sup L)`.
    pub fn max_shift(&self) -> usize {
        self.max_shift
    }

    /// The `p`-th Fourier coefficient slice `f_p(x) = k(p / L(x)) / L(x)`.
    pub fn f_p(&self, p: i64, x: f64) -> f64 {
        let l = self.length.evaluate(x);
        self.filter.evaluate(p as f64 / l) / l
    }

    /// Evaluate the symbol in cosine form, optionally truncated to `|p| <= m`.
    pub fn eval(&self, x: f64, theta: f64, truncation: Option<usize>) -> f64 {
        let p_max = truncation.map_or(self.max_shift, |m| m.min(self.max_shift));
        let mut acc = self.f_p(0, x);
        for p in 1..=p_max as i64 {
            let fp = self.f_p(p, x);
            if fp != 0.0 {
                // cos of the absolute argument keeps theta-evenness exact.
                acc += 2.0 * fp * fmath::cos(fmath::abs(p as f64 * theta));
            }
        }
        acc
    }

    /// Complex-exponential evaluation `sum_p f_p(x) e^{ip theta}`; the
    /// imaginary part is a numerical-realness witness.
    pub fn eval_complex(&self, x: f64, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(self.f_p(0, x), 0.0);
        for p in 1..=self.max_shift as i64 {
            let fp = self.f_p(p, x);
            let fm = self.f_p(-p, x);
            let (s, c) = (fmath::sin(p as f64 * theta), fmath::cos(p as f64 * theta));
            acc += Complex64::new(c * fp, s * fp);
            acc += Complex64::new(c * fm, -s * fm);
        }
        acc
    }

    /// Extrema over the tensor grid `{i/(nx-1)} x {-pi + 2 pi j/(ntheta-1)}`.
    pub fn range(&self, nx: usize, ntheta: usize) -> SymbolRange {
        assert!(
            nx >= 2 && ntheta >= 2,
            "range grid needs at least 2x2 points"
        );
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut argmin = (0.0, 0.0);
        let mut argmax = (0.0, 0.0);
        for i in 0..nx {
            let x = i as f64 / (nx - 1) as f64;
            for j in 0..ntheta {
                let theta = -PI + 2.0 * PI * j as f64 / (ntheta - 1) as f64;
                let v = self.eval(x, theta, None);
                if v < min {
                    min = v;
                    argmin = (x, theta);
                }
                if v > max {
                    max = v;
                    argmax = (x, theta);
                }
            }
        }
        SymbolRange {
            min,
            max,
            argmin,
            argmax,
            condition_ok: min >= -CONDITION_TOL && max <= 2.0 + CONDITION_TOL,
        }
    }

    /// `n` symbol samples on a near-square uniform tensor grid over
    /// `[0,1] x [-pi, pi]` (n1 = round(sqrt n) rows, endpoints included),
    /// taken row-major and sorted ascending. The grid shape is a
    /// non-normative choice; the distribution statement allows any uniform
    /// grid filling the domain.
    pub fn sample_sorted(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1);
        let n1 = (fmath::round(fmath::sqrt(n as f64)) as usize).max(1);
        let n2 = n.div_ceil(n1);
        let mut out = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            let x = if n1 == 1 {
                0.5
            } else {
                i as f64 / (n1 - 1) as f64
            };
            for j in 0..n2 {
                let theta = if n2 == 1 {
                    0.0
                } else {
                    -PI + 2.0 * PI * j as f64 / (n2 - 1) as f64
                };
                out.push(self.eval(x, theta, None));
            }
        }
        out.truncate(n);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// The three row polynomials of the divergence fixture, evaluated at `theta`.
pub fn f123_polynomials(theta: f64) -> (f64, f64, f64) {
    let coeffs = f123_coefficients();
    let eval = |c: &[Ratio]| -> f64 {
        let mut acc = c[0].to_f64();
        for (p, cp) in c.iter().enumerate().skip(1) {
            acc += cp.to_f64() * fmath::cos(fmath::abs(p as f64 * theta));
        }
        acc
    };
    (eval(&coeffs[0]), eval(&coeffs[1]), eval(&coeffs[2]))
}

/// Exact cosine coefficients of the three fixture polynomials
/// (`f(theta) = c_0 + sum_{p>=1} c_p cos(p theta)`).
pub fn f123_coefficients() -> [Vec<Ratio>; 3] {
    let r = Ratio::new;
    [
        alloc::vec![r(7, 10), r(24, 25), r(3, 10)],
        alloc::vec![
            r(19, 50),
            r(17, 25),
            r(62, 125),
            r(36, 125),
            r(31, 250),
            r(4, 125),
        ],
        alloc::vec![r(49, 100), r(41, 50), r(12, 25), r(9, 50), r(3, 100)],
    ]
}

/// Exact evaluation of fixture polynomial `which` (0, 1, or 2) at
/// `y = cos(theta)`, via the Chebyshev recurrence `cos(p theta) = T_p(y)`.
pub fn f123_eval_exact(which: usize, y: Ratio) -> Ratio {
    let coeffs = &f123_coefficients()[which];
    let two = Ratio::from_integer(2);
    let mut acc = coeffs[0];
    let mut t_prev = Ratio::ONE; // T_0
    let mut t_cur = y; // T_1
    for cp in coeffs.iter().skip(1) {
        acc = acc + *cp * t_cur;
        let t_next = two * y * t_cur - t_prev;
        t_prev = t_cur;
        t_cur = t_next;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{Filter, LengthFunction};

    #[test]
    fn uniform_unit_length_symbol_is_constant_one() {
        let sym = Symbol::new(Filter::uniform(), LengthFunction::constant(1.0).unwrap());
        for i in 0..=10 {
            for j in 0..=10 {
                let x = i as f64 / 10.0;
                let theta = -PI + 2.0 * PI * j as f64 / 10.0;
                assert_eq!(sym.eval(x, theta, None), 1.0);
            }
        }
        let r = sym.range(11, 33);
        assert_eq!((r.min, r.max), (1.0, 1.0));
        assert!(r.condition_ok);
        assert!(sym.sample_sorted(7).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn triangular_width_two_symbol_closed_form() {
        let sym = Symbol::new(Filter::triangular(), LengthFunction::constant(2.0).unwrap());
        assert_eq!(sym.f_p(1, 0.3), 0.25);
        assert_eq!(sym.f_p(0, 0.9), 0.5);
        assert_eq!(sym.f_p(5, 0.5), 0.0, "beyond the kernel support");
        for j in 0..32 {
            let theta = -PI + 2.0 * PI * j as f64 / 31.0;
            let expect = 0.5 + 0.5 * theta.cos();
            assert!((sym.eval(0.4, theta, None) - expect).abs() <= 1e-15);
        }
    }

    #[test]
    fn sample_sorted_matches_closed_form_on_small_grid() {
        let sym = Symbol::new(Filter::triangular(), LengthFunction::constant(2.0).unwrap());
        // n = 4: a 2x2 grid, theta in {-pi, pi}, so all samples are
        // 1/2 + cos(+-pi)/2 = 0.
        let s = sym.sample_sorted(4);
        assert_eq!(s.len(), 4);
        for v in s {
            assert!(v.abs() <= 1e-15, "sample {v}");
        }
    }

    #[test]
    fn theta_evenness_is_exact() {
        let sym = Symbol::new(
            Filter::triangular(),
            LengthFunction::step(&[0.5], &[2.0, 3.0]).unwrap(),
        );
        for i in 0..=7 {
            let x = i as f64 / 7.0;
            for j in 1..=9 {
                let theta = PI * j as f64 / 9.0;
                assert_eq!(sym.eval(x, theta, None), sym.eval(x, -theta, None));
            }
        }
    }

    #[test]
    fn exponential_and_cosine_forms_agree() {
        let sym = Symbol::new(
            Filter::triangular(),
            LengthFunction::step(&[0.25], &[3.0, 4.5]).unwrap(),
        );
        for i in 0..=5 {
            let x = i as f64 / 5.0;
            for j in 0..=11 {
                let theta = -PI + 2.0 * PI * j as f64 / 11.0;
                let z = sym.eval_complex(x, theta);
                assert!(z.im.abs() <= 1e-13, "imaginary residue {im}", im = z.im);
                assert!((z.re - sym.eval(x, theta, None)).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn truncated_eval_caps_at_max_shift() {
        let sym = Symbol::new(Filter::triangular(), LengthFunction::constant(4.0).unwrap());
        let full = sym.eval(0.5, 1.0, None);
        assert_eq!(sym.eval(0.5, 1.0, Some(100)), full);
        // m = 0 leaves only the central coefficient.
        assert_eq!(sym.eval(0.5, 1.0, Some(0)), sym.f_p(0, 0.5));
    }

    #[test]
    fn fixture_polynomials_at_zero_and_pi() {
        let (f1, f2, f3) = f123_polynomials(0.0);
        assert_eq!(f1, 1.96);
        assert_eq!(f2, 2.0);
        assert_eq!(f3, 2.0);

        // Exact: at theta = 0, y = 1.
        assert_eq!(f123_eval_exact(0, Ratio::ONE), Ratio::new(49, 25));
        assert_eq!(f123_eval_exact(1, Ratio::ONE), Ratio::from_integer(2));
        assert_eq!(f123_eval_exact(2, Ratio::ONE), Ratio::from_integer(2));

        // f_2 has an exact root at theta = pi (y = -1).
        assert_eq!(
            f123_eval_exact(1, -Ratio::ONE),
            Ratio::ZERO,
            "the (y+1) factor"
        );
        let (_, f2_pi, _) = f123_polynomials(PI);
        assert!(f2_pi.abs() <= 1e-15);
    }

    #[test]
    fn fixture_polynomial_one_at_its_minimum() {
        // f_1 rewritten in y = cos(theta) is (15y + 12)^2/375 + 6/375,
        // so its value at y = -12/15 is exactly 6/375.
        assert_eq!(f123_eval_exact(0, Ratio::new(-12, 15)), Ratio::new(6, 375));
    }

    #[test]
    fn fixture_polynomials_nonnegative_on_dense_grid() {
        for j in 0..100_000 {
            let theta = -PI + 2.0 * PI * j as f64 / 99_999.0;
            let (f1, f2, f3) = f123_polynomials(theta);
            assert!(f1 >= -1e-12 && f2 >= -1e-12 && f3 >= -1e-12, "at {theta}");
        }
    }
}
