//! Dense real nonsymmetric eigensolver.
//!
//! The classic reduction chain: Parlett-Reinsch balancing, Householder
//! reduction to upper Hessenberg form, Francis double-shift QR iteration with
//! deflation, and (optionally) eigenvectors by back-substitution on the
//! quasi-triangular form. The algorithm follows the EISPACK/JAMA lineage
//! (hqr2), transcribed to 0-based dense row-major storage.
//!
//! Contract: all n eigenvalues with backward error at the round-off level of
//! the QR iteration, deterministic ordering by (real part, imaginary part);
//! iteration budget 50 per deflation step and 50 n overall.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::fmath;
use crate::matrices::Mat;

const EPS: f64 = 2.220446049250313e-16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenError {
    /// QR iteration failed to deflate within the iteration budget.
    NonConvergence { remaining: usize },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::NonConvergence { remaining } => write!(
                f,
                "QR iteration exhausted its budget with {remaining} eigenvalues unresolved"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EigenError {}

pub struct EigenDecomposition {
    /// Eigenvalues sorted by (re, im).
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors matching `values`, when requested.
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

/// Eigenvalues only.
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex64>, EigenError> {
    Ok(decompose(a, false)?.values)
}

/// Eigenvalues and unit-norm right eigenvectors.
pub fn decompose(a: &Mat, want_vectors: bool) -> Result<EigenDecomposition, EigenError> {
    let n = a.n();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut work = Workspace::new(a, want_vectors);
    work.balance();
    work.reduce_to_hessenberg();
    work.francis_qr()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (work.d[i], work.e[i])
            .partial_cmp(&(work.d[j], work.e[j]))
            .unwrap()
    });

    let values: Vec<Complex64> = order
        .iter()
        .map(|&i| Complex64::new(work.d[i], work.e[i]))
        .collect();

    let vectors = if want_vectors {
        let raw = work.complex_vectors();
        Some(order.iter().map(|&i| raw[i].clone()).collect())
    } else {
        None
    };

    Ok(EigenDecomposition { values, vectors })
}

struct Workspace {
    n: usize,
    /// Working matrix (Hessenberg, then quasi-triangular), row-major.
    h: Vec<f64>,
    /// Accumulated transformations (only when vectors are wanted).
    v: Vec<f64>,
    /// Balancing scale factors.
    scale: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
    want_vectors: bool,
}

impl Workspace {
    fn new(a: &Mat, want_vectors: bool) -> Workspace {
        let n = a.n();
        Workspace {
            n,
            h: a.data().to_vec(),
            v: if want_vectors {
                let mut v = vec![0.0; n * n];
                for i in 0..n {
                    v[i * n + i] = 1.0;
                }
                v
            } else {
                Vec::new()
            },
            scale: vec![1.0; n],
            d: vec![0.0; n],
            e: vec![0.0; n],
            want_vectors,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.h[i * self.n + j] = x;
    }

    /// Diagonal similarity scaling that equalizes row and column norms
    /// (radix-2 so the scaling is exact).
    fn balance(&mut self) {
        let n = self.n;
        const RADIX: f64 = 2.0;
        let mut done = false;
        let mut rounds = 0;
        while !done && rounds < 100 {
            done = true;
            rounds += 1;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 0..n {
                    if j != i {
                        r += fmath::abs(self.at(i, j));
                        c += fmath::abs(self.at(j, i));
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut c_scaled = c;
                let g = r / RADIX;
                while c_scaled < g {
                    f *= RADIX;
                    c_scaled *= RADIX * RADIX;
                }
                let g = r * RADIX;
                while c_scaled >= g {
                    f /= RADIX;
                    c_scaled /= RADIX * RADIX;
                }
                if (c_scaled + r) / f < 0.95 * s && f != 1.0 {
                    done = false;
                    self.scale[i] *= f;
                    for j in 0..n {
                        let x = self.at(i, j) / f;
                        self.set(i, j, x);
                    }
                    for j in 0..n {
                        let x = self.at(j, i) * f;
                        self.set(j, i, x);
                    }
                }
            }
        }
    }

    /// Householder reduction to upper Hessenberg form, accumulating the
    /// orthogonal transformation when vectors are wanted.
    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut ort = vec![0.0; n];

        for m in 1..n - 1 {
            let mut col_scale = 0.0;
            for i in m..n {
                col_scale += fmath::abs(self.at(i, m - 1));
            }
            if col_scale == 0.0 {
                continue;
            }
            let mut hh = 0.0;
            for i in (m..n).rev() {
                ort[i] = self.at(i, m - 1) / col_scale;
                hh += ort[i] * ort[i];
            }
            let mut g = fmath::sqrt(hh);
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = 0.0;
                for i in (m..n).rev() {
                    f += ort[i] * self.at(i, j);
                }
                f /= hh;
                for i in m..n {
                    let x = self.at(i, j) - f * ort[i];
                    self.set(i, j, x);
                }
            }
            for i in 0..n {
                let mut f = 0.0;
                for j in (m..n).rev() {
                    f += ort[j] * self.at(i, j);
                }
                f /= hh;
                for j in m..n {
                    let x = self.at(i, j) - f * ort[j];
                    self.set(i, j, x);
                }
            }
            if self.want_vectors {
                // Accumulate immediately with the same reflector:
                // V := V * P_m builds Q = P_1 P_2 ... left to right.
                for row in 0..n {
                    let mut f = 0.0;
                    for j in m..n {
                        f += ort[j] * self.v[row * n + j];
                    }
                    f /= hh;
                    for j in m..n {
                        self.v[row * n + j] -= f * ort[j];
                    }
                }
            }
            self.set(m, m - 1, col_scale * g);
        }
        // Zero out the area below the subdiagonal.
        for i in 2..n {
            for j in 0..i - 1 {
                self.set(i, j, 0.0);
            }
        }
    }

    /// Francis double-shift QR with deflation on the Hessenberg matrix.
    fn francis_qr(&mut self) -> Result<(), EigenError> {
        let nn = self.n;
        let low = 0usize;
        let high = nn - 1;
        let mut exshift = 0.0;

        // Row-sum norm over the Hessenberg envelope.
        let mut norm = 0.0;
        for i in 0..nn {
            for j in i.saturating_sub(1)..nn {
                norm += fmath::abs(self.at(i, j));
            }
        }

        let total_budget = 50 * nn.max(1);
        let mut total_iter = 0usize;
        let mut iter = 0usize;

        let mut end = high as isize;
        while end >= low as isize {
            let n = end as usize;

            // Look for a negligible subdiagonal element.
            let mut l = n;
            while l > low {
                let mut s = fmath::abs(self.at(l - 1, l - 1)) + fmath::abs(self.at(l, l));
                if s == 0.0 {
                    s = norm;
                }
                if fmath::abs(self.at(l, l - 1)) < EPS * s {
                    break;
                }
                l -= 1;
            }

            if l == n {
                // One root found.
                let x = self.at(n, n) + exshift;
                self.set(n, n, x);
                self.d[n] = x;
                self.e[n] = 0.0;
                end -= 1;
                iter = 0;
            } else if l == n - 1 {
                // Two roots found.
                let w = self.at(n, n - 1) * self.at(n - 1, n);
                let mut p = (self.at(n - 1, n - 1) - self.at(n, n)) / 2.0;
                let mut q = p * p + w;
                let mut z = fmath::sqrt(fmath::abs(q));
                let x0 = self.at(n, n) + exshift;
                self.set(n, n, x0);
                let y0 = self.at(n - 1, n - 1) + exshift;
                self.set(n - 1, n - 1, y0);
                let x = x0;

                if q >= 0.0 {
                    // Real pair.
                    z = if p >= 0.0 { p + z } else { p - z };
                    self.d[n - 1] = x + z;
                    self.d[n] = if z != 0.0 { x - w / z } else { self.d[n - 1] };
                    self.e[n - 1] = 0.0;
                    self.e[n] = 0.0;
                    let x = self.at(n, n - 1);
                    let s = fmath::abs(x) + fmath::abs(z);
                    p = x / s;
                    q = z / s;
                    let r = fmath::sqrt(p * p + q * q);
                    p /= r;
                    q /= r;
                    // Row modification.
                    for j in n - 1..nn {
                        let z = self.at(n - 1, j);
                        self.set(n - 1, j, q * z + p * self.at(n, j));
                        let t = q * self.at(n, j) - p * z;
                        self.set(n, j, t);
                    }
                    // Column modification.
                    for i in 0..=n {
                        let z = self.at(i, n - 1);
                        self.set(i, n - 1, q * z + p * self.at(i, n));
                        let t = q * self.at(i, n) - p * z;
                        self.set(i, n, t);
                    }
                    // Accumulate transformations.
                    if self.want_vectors {
                        for i in low..=high {
                            let z = self.v[i * nn + (n - 1)];
                            self.v[i * nn + (n - 1)] = q * z + p * self.v[i * nn + n];
                            self.v[i * nn + n] = q * self.v[i * nn + n] - p * z;
                        }
                    }
                } else {
                    // Complex pair.
                    self.d[n - 1] = x + p;
                    self.d[n] = x + p;
                    self.e[n - 1] = z;
                    self.e[n] = -z;
                }
                end -= 2;
                iter = 0;
            } else {
                // No convergence yet: form a shift.
                let mut x = self.at(n, n);
                let mut y = self.at(n - 1, n - 1);
                let mut w = self.at(n, n - 1) * self.at(n - 1, n);

                if iter == 10 || iter == 20 {
                    // Wilkinson's exceptional shift.
                    exshift += x;
                    for i in low..=n {
                        let t = self.at(i, i) - x;
                        self.set(i, i, t);
                    }
                    let s = fmath::abs(self.at(n, n - 1)) + fmath::abs(self.at(n - 1, n - 2));
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }

                iter += 1;
                total_iter += 1;
                if iter > 50 || total_iter > total_budget {
                    return Err(EigenError::NonConvergence {
                        remaining: end as usize + 1,
                    });
                }

                // Look for two consecutive small subdiagonal elements.
                let mut m = n - 2;
                let (mut p, mut q, mut r);
                loop {
                    let z = self.at(m, m);
                    let rr = x - z;
                    let ss = y - z;
                    p = (rr * ss - w) / self.at(m + 1, m) + self.at(m, m + 1);
                    q = self.at(m + 1, m + 1) - z - rr - ss;
                    r = self.at(m + 2, m + 1);
                    let s = fmath::abs(p) + fmath::abs(q) + fmath::abs(r);
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    if fmath::abs(self.at(m, m - 1)) * (fmath::abs(q) + fmath::abs(r))
                        < EPS
                            * (fmath::abs(p)
                                * (fmath::abs(self.at(m - 1, m - 1))
                                    + fmath::abs(z)
                                    + fmath::abs(self.at(m + 1, m + 1))))
                    {
                        break;
                    }
                    m -= 1;
                }

                for i in m + 2..=n {
                    self.set(i, i - 2, 0.0);
                    if i > m + 2 {
                        self.set(i, i - 3, 0.0);
                    }
                }

                // Double QR step on rows l..n and columns m..n.
                for k in m..n {
                    let notlast = k != n - 1;
                    if k != m {
                        p = self.at(k, k - 1);
                        q = self.at(k + 1, k - 1);
                        r = if notlast { self.at(k + 2, k - 1) } else { 0.0 };
                        x = fmath::abs(p) + fmath::abs(q) + fmath::abs(r);
                        if x == 0.0 {
                            continue;
                        }
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                    let mut s = fmath::sqrt(p * p + q * q + r * r);
                    if p < 0.0 {
                        s = -s;
                    }
                    if s == 0.0 {
                        continue;
                    }
                    if k != m {
                        self.set(k, k - 1, -s * x);
                    } else if l != m {
                        let t = -self.at(k, k - 1);
                        self.set(k, k - 1, t);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;

                    // Row modification.
                    for j in k..nn {
                        let mut pp = self.at(k, j) + q * self.at(k + 1, j);
                        if notlast {
                            pp += r * self.at(k + 2, j);
                            let t = self.at(k + 2, j) - pp * z;
                            self.set(k + 2, j, t);
                        }
                        let t = self.at(k, j) - pp * x;
                        self.set(k, j, t);
                        let t = self.at(k + 1, j) - pp * y;
                        self.set(k + 1, j, t);
                    }
                    // Column modification.
                    let i_hi = if n < k + 3 { n } else { k + 3 };
                    for i in 0..=i_hi {
                        let mut pp = x * self.at(i, k) + y * self.at(i, k + 1);
                        if notlast {
                            pp += z * self.at(i, k + 2);
                            let t = self.at(i, k + 2) - pp * r;
                            self.set(i, k + 2, t);
                        }
                        let t = self.at(i, k) - pp;
                        self.set(i, k, t);
                        let t = self.at(i, k + 1) - pp * q;
                        self.set(i, k + 1, t);
                    }
                    // Accumulate transformations.
                    if self.want_vectors {
                        for i in low..=high {
                            let mut pp = x * self.v[i * nn + k] + y * self.v[i * nn + k + 1];
                            if notlast {
                                pp += z * self.v[i * nn + k + 2];
                                self.v[i * nn + k + 2] -= pp * r;
                            }
                            self.v[i * nn + k] -= pp;
                            self.v[i * nn + k + 1] -= pp * q;
                        }
                    }
                }
            }
        }

        if self.want_vectors && norm != 0.0 {
            self.back_substitute(norm);
        }
        Ok(())
    }

    /// Back-substitution for the eigenvectors of the quasi-triangular form,
    /// then back-multiplication by the accumulated transformations and
    /// undoing the balancing.
    fn back_substitute(&mut self, norm: f64) {
        let nn = self.n;
        let low = 0usize;
        let high = nn - 1;

        let mut z;
        let mut s = 0.0;
        let mut r = 0.0;

        for nd in (0..nn).rev() {
            let p = self.d[nd];
            let q = self.e[nd];
            if q == 0.0 {
                // Real eigenvector.
                let mut l = nd;
                self.set(nd, nd, 1.0);
                z = 0.0;
                for i in (0..nd).rev() {
                    let w = self.at(i, i) - p;
                    r = 0.0;
                    for j in l..=nd {
                        r += self.at(i, j) * self.at(j, nd);
                    }
                    if self.e[i] < 0.0 {
                        z = w;
                        s = r;
                    } else {
                        l = i;
                        if self.e[i] == 0.0 {
                            let t = if w != 0.0 { -r / w } else { -r / (EPS * norm) };
                            self.set(i, nd, t);
                        } else {
                            // Solve the real 2x2 block.
                            let x = self.at(i, i + 1);
                            let y = self.at(i + 1, i);
                            let qq = (self.d[i] - p) * (self.d[i] - p) + self.e[i] * self.e[i];
                            let t = (x * s - z * r) / qq;
                            self.set(i, nd, t);
                            let t2 = if fmath::abs(x) > fmath::abs(z) {
                                (-r - w * t) / x
                            } else {
                                (-s - y * t) / z
                            };
                            self.set(i + 1, nd, t2);
                        }
                        // Overflow control.
                        let t = fmath::abs(self.at(i, nd));
                        if (EPS * t) * t > 1.0 {
                            for j in i..=nd {
                                let v = self.at(j, nd) / t;
                                self.set(j, nd, v);
                            }
                        }
                    }
                }
            } else if q < 0.0 {
                // Complex pair: vector for the eigenvalue with negative
                // imaginary part lands in columns nd-1 (real) and nd (imag).
                let mut l = nd - 1;
                if fmath::abs(self.at(nd, nd - 1)) > fmath::abs(self.at(nd - 1, nd)) {
                    let t = q / self.at(nd, nd - 1);
                    self.set(nd - 1, nd - 1, t);
                    let t = -(self.at(nd, nd) - p) / self.at(nd, nd - 1);
                    self.set(nd - 1, nd, t);
                } else {
                    let (cr, ci) = cdiv(0.0, -self.at(nd - 1, nd), self.at(nd - 1, nd - 1) - p, q);
                    self.set(nd - 1, nd - 1, cr);
                    self.set(nd - 1, nd, ci);
                }
                self.set(nd, nd - 1, 0.0);
                self.set(nd, nd, 1.0);
                z = 0.0;
                for i in (0..nd.saturating_sub(1)).rev() {
                    let mut ra = 0.0;
                    let mut sa = 0.0;
                    for j in l..=nd {
                        ra += self.at(i, j) * self.at(j, nd - 1);
                        sa += self.at(i, j) * self.at(j, nd);
                    }
                    let w = self.at(i, i) - p;
                    if self.e[i] < 0.0 {
                        z = w;
                        r = ra;
                        s = sa;
                    } else {
                        l = i;
                        if self.e[i] == 0.0 {
                            let (cr, ci) = cdiv(-ra, -sa, w, q);
                            self.set(i, nd - 1, cr);
                            self.set(i, nd, ci);
                        } else {
                            // Solve the complex 2x2 block.
                            let x = self.at(i, i + 1);
                            let y = self.at(i + 1, i);
                            let mut vr =
                                (self.d[i] - p) * (self.d[i] - p) + self.e[i] * self.e[i] - q * q;
                            let vi = (self.d[i] - p) * 2.0 * q;
                            if vr == 0.0 && vi == 0.0 {
                                vr = EPS
                                    * norm
                                    * (fmath::abs(w)
                                        + fmath::abs(q)
                                        + fmath::abs(x)
                                        + fmath::abs(y)
                                        + fmath::abs(z));
                            }
                            let (cr, ci) =
                                cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                            self.set(i, nd - 1, cr);
                            self.set(i, nd, ci);
                            if fmath::abs(x) > fmath::abs(z) + fmath::abs(q) {
                                let t = (-ra - w * self.at(i, nd - 1) + q * self.at(i, nd)) / x;
                                self.set(i + 1, nd - 1, t);
                                let t = (-sa - w * self.at(i, nd) - q * self.at(i, nd - 1)) / x;
                                self.set(i + 1, nd, t);
                            } else {
                                let (cr, ci) = cdiv(
                                    -r - y * self.at(i, nd - 1),
                                    -s - y * self.at(i, nd),
                                    z,
                                    q,
                                );
                                self.set(i + 1, nd - 1, cr);
                                self.set(i + 1, nd, ci);
                            }
                        }
                        // Overflow control.
                        let t = fmath::abs(self.at(i, nd - 1)).max(fmath::abs(self.at(i, nd)));
                        if (EPS * t) * t > 1.0 {
                            for j in i..=nd {
                                let v1 = self.at(j, nd - 1) / t;
                                self.set(j, nd - 1, v1);
                                let v2 = self.at(j, nd) / t;
                                self.set(j, nd, v2);
                            }
                        }
                    }
                }
            }
        }

        // Back-multiply by the accumulated transformations.
        for j in (low..nn).rev() {
            for i in low..=high {
                let mut acc = 0.0;
                for k in low..=j.min(high) {
                    acc += self.v[i * nn + k] * self.at(k, j);
                }
                self.v[i * nn + j] = acc;
            }
        }

        // Undo the balancing: rows were divided by scale[i].
        for i in 0..nn {
            if self.scale[i] != 1.0 {
                for j in 0..nn {
                    self.v[i * nn + j] *= self.scale[i];
                }
            }
        }
    }

    /// Convert the real-packed eigenvector storage to complex column vectors
    /// (index k matches d[k] + i e[k]), normalized to unit length.
    fn complex_vectors(&self) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let mut out = vec![Vec::new(); n];
        let mut k = 0;
        while k < n {
            if self.e[k] == 0.0 {
                let col: Vec<Complex64> = (0..n)
                    .map(|i| Complex64::new(self.v[i * n + k], 0.0))
                    .collect();
                out[k] = normalize(col);
                k += 1;
            } else {
                // Conjugate pair: e[k] > 0, e[k+1] = -e[k].
                let plus: Vec<Complex64> = (0..n)
                    .map(|i| Complex64::new(self.v[i * n + k], self.v[i * n + k + 1]))
                    .collect();
                let minus: Vec<Complex64> = plus.iter().map(|z| z.conj()).collect();
                out[k] = normalize(plus);
                out[k + 1] = normalize(minus);
                k += 2;
            }
        }
        out
    }
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = fmath::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    v
}

/// Robust complex division (a + bi) / (c + di).
fn cdiv(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    if fmath::abs(c) > fmath::abs(d) {
        let r = d / c;
        let den = c + d * r;
        ((a + b * r) / den, (b - a * r) / den)
    } else {
        let r = c / d;
        let den = c * r + d;
        ((a * r + b) / den, (b * r - a) / den)
    }
}
