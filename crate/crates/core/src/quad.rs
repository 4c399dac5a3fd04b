//! Quadrature: adaptive Gauss–Kronrod, endpoint-singular substitution and
//! Gauss–Jacobi rules from the Golub–Welsch eigenproblem.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One G7/K15 panel on `[a, b]`: Kronrod value and |K15 - G7| estimate.
pub fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[i];
        if i % 2 == 1 {
            g = g + s * WG[i / 2];
        }
    }
    let kv = k * h;
    let gv = g * h;
    (kv, (kv - gv).magnitude())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
    pub intervals: usize,
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive bisection driven by the largest local error estimate.
pub fn adaptive<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult<V> {
    if a == b {
        return QuadResult { value: V::zero(), error: 0.0, converged: true, intervals: 0 };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    loop {
        let tol = abs_tol.max(rel_tol * total.magnitude());
        if err <= tol || !err.is_finite() && !total.magnitude().is_finite() {
            break;
        }
        if count >= max_intervals {
            break;
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        total = total - worst.value + v1 + v2;
        err = err - worst.error + e1 + e2;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
        count += 1;
    }
    // Re-sum to shed the drift of the running updates.
    let mut value = V::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        error += p.error;
    }
    let tol = abs_tol.max(rel_tol * value.magnitude());
    QuadResult { value, error, converged: error <= tol && value.magnitude().is_finite(), intervals: count }
}

/// A quadrature node with accurate distances to both ends of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loc {
    pub t: f64,
    /// `t - a`, exact up to rounding of the mapped variable.
    pub dl: f64,
    /// `b - t`.
    pub dr: f64,
}

/// Integrates `f` over `[a, b]` when `f` may behave like `(t-a)^alpha_a`
/// near `a` and `(b-t)^alpha_b` near `b` (each exponent `> -1`).
///
/// Each half is mapped with `t - a = h u^{1/(1+alpha)}`, which cancels the
/// algebraic endpoint factor. The integrand receives the endpoint distances
/// directly so nothing is lost to cancellation near the ends.
pub fn integrate_singular<V: QuadValue, F: FnMut(Loc) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    alpha_a: Option<f64>,
    alpha_b: Option<f64>,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult<V> {
    if a >= b {
        return QuadResult { value: V::zero(), error: 0.0, converged: true, intervals: 0 };
    }
    let len = b - a;
    let m = 0.5 * (a + b);
    let h = m - a;
    let left = match alpha_a {
        Some(al) if al != 0.0 => {
            let e = 1.0 / (1.0 + al);
            adaptive(
                |u: f64| {
                    if u <= 0.0 {
                        return V::zero();
                    }
                    let ue = libm::pow(u, e);
                    let dl = h * ue;
                    f(Loc { t: a + dl, dl, dr: len - dl }) * (h * e * ue / u)
                },
                0.0,
                1.0,
                abs_tol * 0.5,
                rel_tol,
                400,
            )
        }
        _ => adaptive(|t: f64| f(Loc { t, dl: t - a, dr: b - t }), a, m, abs_tol * 0.5, rel_tol, 400),
    };
    let right = match alpha_b {
        Some(ar) if ar != 0.0 => {
            let e = 1.0 / (1.0 + ar);
            adaptive(
                |u: f64| {
                    if u <= 0.0 {
                        return V::zero();
                    }
                    let ue = libm::pow(u, e);
                    let dr = h * ue;
                    f(Loc { t: b - dr, dl: len - dr, dr }) * (h * e * ue / u)
                },
                0.0,
                1.0,
                abs_tol * 0.5,
                rel_tol,
                400,
            )
        }
        _ => adaptive(|t: f64| f(Loc { t, dl: t - a, dr: b - t }), m, b, abs_tol * 0.5, rel_tol, 400),
    };
    QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
        converged: left.converged && right.converged,
        intervals: left.intervals + right.intervals,
    }
}

/// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
/// Nodes are returned in increasing order.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let ab = alpha + beta;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let diag = if i == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        };
        t[(i, i)] = diag;
        if i + 1 < n {
            let m = (i + 1) as f64;
            let b2 = if i == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                let s = 2.0 * m + ab;
                4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = libm::sqrt(b2);
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let mu0 = libm::exp(
        (ab + 1.0) * core::f64::consts::LN_2 + libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
            - libm::lgamma(ab + 2.0),
    );
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}
