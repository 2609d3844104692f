//! Exact rational arithmetic over `i128`, used for the bit-faithful fixtures
//! (filter node tables, the 3x3 divergence counterexample) and for the exact
//! characteristic-polynomial and determinant checks on small matrices.
//!
//! Values stay small in the intended uses (node tables with denominators up
//! to a few thousand, matrices up to 6x6); every operation reduces through
//! the gcd, and overflow panics rather than silently wrapping.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    /// Reduced fraction. Panics on a zero denominator.
    pub fn new(num: i128, den: i128) -> Ratio {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_integer(n: i128) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    /// Exact conversion of a finite `f64` (every finite double is dyadic).
    /// Returns `None` when the exponent is too extreme for `i128`.
    pub fn from_f64(x: f64) -> Option<Ratio> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Ratio::ZERO);
        }
        let bits = x.to_bits();
        let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if biased == 0 {
            (frac as i128, -1074i64)
        } else {
            ((frac | (1 << 52)) as i128, biased - 1075)
        };
        if exp >= 0 {
            if exp > 70 {
                return None;
            }
            Some(Ratio::new(sign * (mantissa << exp), 1))
        } else {
            let shift = -exp;
            if shift > 120 {
                return None;
            }
            Some(Ratio::new(sign * mantissa, 1i128 << shift))
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn abs(&self) -> Ratio {
        Ratio {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn recip(&self) -> Ratio {
        assert!(self.num != 0, "reciprocal of zero");
        Ratio::new(self.den, self.num)
    }

    fn checked_mul_i128(a: i128, b: i128) -> i128 {
        a.checked_mul(b).expect("rational overflow")
    }
}

impl Add for Ratio {
    type Output = Ratio;
    fn add(self, rhs: Ratio) -> Ratio {
        let g = gcd(self.den, rhs.den);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let num = Ratio::checked_mul_i128(self.num, lhs_scale)
            .checked_add(Ratio::checked_mul_i128(rhs.num, rhs_scale))
            .expect("rational overflow");
        Ratio::new(num, Ratio::checked_mul_i128(self.den, lhs_scale))
    }
}

impl Sub for Ratio {
    type Output = Ratio;
    fn sub(self, rhs: Ratio) -> Ratio {
        self + (-rhs)
    }
}

impl Mul for Ratio {
    type Output = Ratio;
    fn mul(self, rhs: Ratio) -> Ratio {
        // Cross-reduce before multiplying to keep the factors small.
        let g1 = gcd(self.num, rhs.den);
        let g2 = gcd(rhs.num, self.den);
        Ratio::new(
            Ratio::checked_mul_i128(self.num / g1, rhs.num / g2),
            Ratio::checked_mul_i128(self.den / g2, rhs.den / g1),
        )
    }
}

impl Div for Ratio {
    type Output = Ratio;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Ratio) -> Ratio {
        self * rhs.recip()
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio {
            num: -self.num,
            den: self.den,
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        let lhs = Ratio::checked_mul_i128(self.num, other.den);
        let rhs = Ratio::checked_mul_i128(other.num, self.den);
        lhs.cmp(&rhs)
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Determinant of a small square rational matrix (row-major), by fraction-free
/// Gaussian elimination.
pub fn determinant(entries: &[Ratio], n: usize) -> Ratio {
    assert_eq!(entries.len(), n * n, "matrix shape mismatch");
    let mut a: Vec<Ratio> = entries.to_vec();
    let mut det = Ratio::ONE;
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !a[r * n + col].is_zero()) {
            Some(r) => r,
            None => return Ratio::ZERO,
        };
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det = det * pivot;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / pivot;
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                a[r * n + j] = a[r * n + j] - factor * a[col * n + j];
            }
        }
    }
    det
}

/// Characteristic polynomial of a small square rational matrix, by the
/// Faddeev-LeVerrier recurrence. Returns monic coefficients
/// `[c_0, c_1, ..., c_n]` of `c_0 + c_1 x + ... + c_n x^n` with `c_n = 1`.
pub fn characteristic_polynomial(entries: &[Ratio], n: usize) -> Vec<Ratio> {
    assert_eq!(entries.len(), n * n, "matrix shape mismatch");
    let mat_mul = |a: &[Ratio], b: &[Ratio]| -> Vec<Ratio> {
        let mut out = vec![Ratio::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
                }
            }
        }
        out
    };
    let trace = |a: &[Ratio]| -> Ratio {
        let mut t = Ratio::ZERO;
        for i in 0..n {
            t = t + a[i * n + i];
        }
        t
    };

    // coeffs[k] multiplies x^(n-k) during the recurrence; coeffs[0] = 1.
    let mut coeffs = vec![Ratio::ZERO; n + 1];
    coeffs[0] = Ratio::ONE;
    let mut m: Vec<Ratio> = entries.to_vec();
    for k in 1..=n {
        let c = -(trace(&m) / Ratio::from_integer(k as i128));
        coeffs[k] = c;
        if k < n {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[i * n + i] = shifted[i * n + i] + c;
            }
            m = mat_mul(entries, &shifted);
        }
    }
    // Reverse into ascending order: [c_0, ..., c_n].
    coeffs.reverse();
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_ordering() {
        assert_eq!(Ratio::new(2, 4), Ratio::new(1, 2));
        assert_eq!(Ratio::new(-3, -6), Ratio::new(1, 2));
        assert_eq!(Ratio::new(3, -6), Ratio::new(-1, 2));
        assert!(Ratio::new(1, 3) < Ratio::new(1, 2));
        assert!(Ratio::new(-1, 2) < Ratio::ZERO);
    }

    #[test]
    fn arithmetic() {
        let a = Ratio::new(1, 6);
        let b = Ratio::new(1, 10);
        assert_eq!(a + b, Ratio::new(4, 15));
        assert_eq!(a - b, Ratio::new(1, 15));
        assert_eq!(a * b, Ratio::new(1, 60));
        assert_eq!(a / b, Ratio::new(5, 3));
    }

    #[test]
    fn exact_f64_round_trip() {
        for &x in &[0.0, 1.0, -2.5, 0.1, 2.1, 1.05, 1e-3, 123456.789] {
            let r = Ratio::from_f64(x).unwrap();
            assert_eq!(r.to_f64(), x, "round-trip of {x}");
        }
        assert_eq!(Ratio::from_f64(0.5).unwrap(), Ratio::new(1, 2));
        assert!(Ratio::from_f64(f64::NAN).is_none());
        assert!(Ratio::from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn determinant_small_cases() {
        let id3: Vec<Ratio> = (0..9)
            .map(|i| if i % 4 == 0 { Ratio::ONE } else { Ratio::ZERO })
            .collect();
        assert_eq!(determinant(&id3, 3), Ratio::ONE);

        // [[1,2],[3,4]] -> -2
        let m = [
            Ratio::from_integer(1),
            Ratio::from_integer(2),
            Ratio::from_integer(3),
            Ratio::from_integer(4),
        ];
        assert_eq!(determinant(&m, 2), Ratio::from_integer(-2));
    }

    #[test]
    fn charpoly_of_2x2() {
        // [[0,1],[1,0]]: x^2 - 1
        let m = [Ratio::ZERO, Ratio::ONE, Ratio::ONE, Ratio::ZERO];
        let p = characteristic_polynomial(&m, 2);
        assert_eq!(p, vec![-Ratio::ONE, Ratio::ZERO, Ratio::ONE]);
    }

    #[test]
    fn charpoly_constant_term_is_signed_determinant() {
        // [[1,2],[3,4]]: x^2 - 5x - 2, c_0 = (-1)^n det = -2... det = -2 so c_0 = det for n=2.
        let m = [
            Ratio::from_integer(1),
            Ratio::from_integer(2),
            Ratio::from_integer(3),
            Ratio::from_integer(4),
        ];
        let p = characteristic_polynomial(&m, 2);
        assert_eq!(p[0], Ratio::from_integer(-2));
        assert_eq!(p[1], Ratio::from_integer(-5));
        assert_eq!(p[2], Ratio::ONE);
    }
}
