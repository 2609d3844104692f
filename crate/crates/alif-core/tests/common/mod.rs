//! Shared oracles for the integration suites.
//!
//! The eigenvalue oracle goes through a route fully independent of the
//! Hessenberg-QR solver: exact rational characteristic polynomials, Yun
//! square-free factorization over the rationals (so multiple roots are
//! separated exactly instead of begging an ill-conditioned root finder), and
//! Durand-Kerner iteration on the square-free parts.

#![allow(dead_code)]

use alif_core::matrices::Mat;
use alif_core::rational::{characteristic_polynomial, Ratio};
use alif_core::Complex64;

/// Polynomial over the rationals, ascending coefficients.
pub type Poly = Vec<Ratio>;

pub fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

pub fn poly_degree(p: &Poly) -> usize {
    p.len() - 1
}

pub fn poly_is_zero(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn poly_derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![Ratio::ZERO];
    }
    let mut out: Poly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Ratio::from_integer(k as i128) * *c)
        .collect();
    poly_trim(&mut out);
    out
}

/// Exact division with remainder over the rationals.
pub fn poly_divrem(num: &Poly, den: &Poly) -> (Poly, Poly) {
    assert!(!poly_is_zero(den), "division by the zero polynomial");
    let dn = poly_degree(den);
    let lead = den[dn];
    if poly_degree(num) < dn {
        return (vec![Ratio::ZERO], num.clone());
    }
    let mut rem = num.clone();
    let mut quot = vec![Ratio::ZERO; poly_degree(num) - dn + 1];
    for k in (0..quot.len()).rev() {
        let coeff = rem[k + dn] / lead;
        quot[k] = coeff;
        if coeff.is_zero() {
            continue;
        }
        for (i, dc) in den.iter().enumerate() {
            rem[k + i] = rem[k + i] - coeff * *dc;
        }
    }
    poly_trim(&mut rem);
    poly_trim(&mut quot);
    (quot, rem)
}

pub fn poly_monic(p: &Poly) -> Poly {
    let mut p = p.clone();
    poly_trim(&mut p);
    let lead = *p.last().unwrap();
    if lead.is_zero() {
        return p;
    }
    p.iter().map(|c| *c / lead).collect()
}

/// Monic greatest common divisor by the Euclidean algorithm.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !poly_is_zero(&b) {
        let (_, r) = poly_divrem(&a, &b);
        a = b;
        b = r;
    }
    poly_monic(&a)
}

/// Yun square-free factorization: returns `(factor, multiplicity)` pairs with
/// each factor square-free and `p = lead * prod factor^multiplicity`.
pub fn yun_square_free(p: &Poly) -> Vec<(Poly, usize)> {
    let p = poly_monic(p);
    if poly_degree(&p) == 0 {
        return Vec::new();
    }
    let dp = poly_derivative(&p);
    let g = poly_gcd(&p, &dp);
    if poly_degree(&g) == 0 {
        return vec![(p, 1)];
    }
    let (mut c, r) = poly_divrem(&p, &g);
    assert!(poly_is_zero(&r), "gcd must divide");
    let (dp_over_g, r) = poly_divrem(&dp, &g);
    assert!(poly_is_zero(&r), "gcd must divide the derivative");
    let mut d = poly_sub(&dp_over_g, &poly_derivative(&c));

    let mut factors = Vec::new();
    let mut mult = 1usize;
    while poly_degree(&c) > 0 {
        let a = poly_gcd(&c, &d);
        if poly_degree(&a) > 0 {
            factors.push((a.clone(), mult));
        }
        let (c_next, r) = poly_divrem(&c, &a);
        assert!(poly_is_zero(&r));
        let (d_over_a, r) = poly_divrem(&d, &a);
        assert!(poly_is_zero(&r));
        d = poly_sub(&d_over_a, &poly_derivative(&c_next));
        c = c_next;
        mult += 1;
    }
    factors
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Ratio::ZERO; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = out[i] + *c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i] - *c;
    }
    poly_trim(&mut out);
    out
}

/// All complex roots of a square-free monic polynomial, by direct formula up
/// to degree 2 and Durand-Kerner beyond.
fn square_free_roots(p: &Poly) -> Vec<Complex64> {
    let deg = poly_degree(p);
    let c: Vec<Complex64> = p.iter().map(|r| Complex64::new(r.to_f64(), 0.0)).collect();
    match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            let sq = disc.sqrt();
            vec![(-c[1] - sq) / (2.0 * c[2]), (-c[1] + sq) / (2.0 * c[2])]
        }
        _ => durand_kerner(&c),
    }
}

fn poly_eval_complex(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for coeff in c.iter().rev() {
        acc = acc * z + coeff;
    }
    acc
}

fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    // Root bound: 1 + max |c_k| for a monic polynomial.
    let bound = 1.0 + c[..deg].iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1) * bound).collect();
    for _ in 0..2000 {
        let mut max_move = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = poly_eval_complex(c, roots[i]) / denom;
            roots[i] -= delta;
            max_move = max_move.max(delta.norm());
        }
        if max_move <= 1e-15 * bound {
            break;
        }
    }
    roots
}

pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
}

/// Eigenvalue oracle: exact characteristic polynomial, exact square-free
/// factorization, then root finding on the (well-conditioned) square-free
/// parts. Returns all eigenvalues with multiplicity, sorted by (re, im).
pub fn charpoly_eigenvalues(entries: &[Ratio], n: usize) -> Vec<Complex64> {
    let p = characteristic_polynomial(entries, n);
    let mut out = Vec::with_capacity(n);
    for (factor, mult) in yun_square_free(&p) {
        for root in square_free_roots(&factor) {
            for _ in 0..mult {
                out.push(root);
            }
        }
    }
    assert_eq!(out.len(), n, "root count must match the matrix size");
    sort_complex(&mut out);
    out
}

pub fn ratio_mat_to_f64(entries: &[Ratio], n: usize) -> Mat {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| entries[i * n + j].to_f64()).collect())
        .collect();
    Mat::from_rows(&rows).unwrap()
}

pub fn r(num: i128, den: i128) -> Ratio {
    Ratio::new(num, den)
}

/// The rational n <= 6 eigenvalue test suite: non-defective matrices only
/// (eigenvalues of defective blocks are ill-conditioned for every solver, so
/// a 1e-9 float comparison would be meaningless there).
pub fn small_rational_suite() -> Vec<(&'static str, usize, Vec<Ratio>)> {
    let z = Ratio::ZERO;
    let one = Ratio::ONE;
    vec![
        ("identity_5", 5, {
            let mut m = vec![z; 25];
            for i in 0..5 {
                m[i * 5 + i] = one;
            }
            m
        }),
        ("swap_2", 2, vec![z, one, one, z]),
        ("diag_3_neg4", 2, vec![r(3, 1), z, z, r(-4, 1)]),
        ("rotation_2", 2, vec![z, -one, one, z]),
        ("upper_triangular_3", 3, {
            vec![r(2, 1), one, z, z, r(3, 1), one, z, z, r(5, 1)]
        }),
        ("tridiag_toeplitz_4", 4, {
            let mut m = vec![z; 16];
            for i in 0..4usize {
                m[i * 4 + i] = one;
                if i + 1 < 4 {
                    m[i * 4 + i + 1] = r(1, 2);
                    m[(i + 1) * 4 + i] = r(1, 2);
                }
            }
            m
        }),
        ("iteration_matrix_6", 6, {
            // Triangular kernel, constant width 2: tridiag(1/4, 1/2, 1/4).
            let mut m = vec![z; 36];
            for i in 0..6usize {
                m[i * 6 + i] = r(1, 2);
                if i + 1 < 6 {
                    m[i * 6 + i + 1] = r(1, 4);
                    m[(i + 1) * 6 + i] = r(1, 4);
                }
            }
            m
        }),
        ("block_rotations_4", 4, {
            let mut m = vec![z; 16];
            m[1] = -one;
            m[4] = one;
            m[2 * 4 + 3] = r(-2, 1);
            m[3 * 4 + 2] = r(2, 1);
            m
        }),
        ("divergence_fixture_3", 3, {
            alif_core::counterexample::expected_matrix().to_vec()
        }),
    ]
}
