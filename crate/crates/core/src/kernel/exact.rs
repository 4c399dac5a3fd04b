//! Exact rational solution of the kernel system on segments.
//!
//! On a segment `z = a + t u` with `|u| = 1`, so `d/dz = u^{-1} d/dt` and a
//! polynomial in `z` is a polynomial in `t` of the same degree. Every row
//! of the system is therefore equivalent to the same row written with
//! `t`-derivatives, whose entries are rational whenever the parameters are.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::system::{EquationKind, KernelSystem};
use crate::curve::CurveKind;
use crate::error::{Error, Result};
use crate::measure::VectorialMeasure;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactKernel {
    pub dim: usize,
    /// Coefficients in the basis `(t - t_c)^i` of every component.
    pub basis: Vec<Vec<BigRational>>,
    /// Exact center `t_c` of every component.
    pub centers: Vec<BigRational>,
    pub rank: usize,
}

fn falling(i: usize, j: usize) -> BigRational {
    let mut acc = BigRational::one();
    for x in (i + 1 - j)..=i {
        acc *= BigRational::from_integer(x.into());
    }
    acc
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Row of `d^order/dt^order` at `t` in the basis `(t - c)^i`, `i < count`.
fn t_row(c: &BigRational, count: usize, t: &BigRational, order: usize) -> Vec<BigRational> {
    let d = t - c;
    (0..count).map(|i| if i < order { BigRational::zero() } else { falling(i, order) * pow(&d, i - order) }).collect()
}

/// Solves the system exactly. Only segment curves are supported.
pub fn solve_exact(mu: &VectorialMeasure, sys: &KernelSystem) -> Result<ExactKernel> {
    if !matches!(mu.curve().kind(), CurveKind::Segment { .. }) {
        return Err(Error::Unsupported("the exact kernel solver handles segments only".into()));
    }
    let dec = &sys.decomposition;
    let centers: Vec<BigRational> = dec
        .components
        .iter()
        .map(|c| (mu.exact_param(c.arc.t0) + mu.exact_param(c.arc.t1)) / BigRational::from_integer(2.into()))
        .collect();
    let n = sys.columns;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for eq in &sys.equations {
        let mut row = alloc::vec![BigRational::zero(); n];
        match eq.kind {
            EquationKind::Atom { component, t, order } => {
                let b = sys.unknowns[component];
                let local = t_row(&centers[component], b.count, &mu.exact_param(t), order);
                for (i, v) in local.into_iter().enumerate() {
                    row[b.offset + i] = v;
                }
            }
            EquationKind::Paste { t, left, right, order } => {
                let te = mu.exact_param(t);
                let (bl, br) = (sys.unknowns[left], sys.unknowns[right]);
                for (i, v) in t_row(&centers[left], bl.count, &te, order).into_iter().enumerate() {
                    row[bl.offset + i] += v;
                }
                for (i, v) in t_row(&centers[right], br.count, &te, order).into_iter().enumerate() {
                    row[br.offset + i] -= v;
                }
            }
        }
        rows.push(row);
    }
    let (rank, basis) = null_space_exact(rows, n);
    Ok(ExactKernel { dim: basis.len(), basis, centers, rank })
}

/// Reduced row echelon form and the null space it exposes.
pub fn null_space_exact(mut rows: Vec<Vec<BigRational>>, n: usize) -> (usize, Vec<Vec<BigRational>>) {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = BigRational::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in col..n {
                    let v = rows[r][c].clone() * &f;
                    rows[i][c] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = alloc::vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[pr][f].clone();
            }
            v
        })
        .collect();
    (pivots.len(), basis)
}

impl ExactKernel {
    /// Value of basis element `e` at parameter `t` (zero off the components).
    pub fn eval(&self, sys: &KernelSystem, e: usize, t: f64) -> f64 {
        let dec = &sys.decomposition;
        let Some(c) = dec
            .components
            .iter()
            .position(|c| c.arc.contains(t))
            .or_else(|| dec.components.iter().position(|c| c.arc.closure_contains(t)))
        else {
            return 0.0;
        };
        let b = sys.unknowns[c];
        let d = t - self.centers[c].to_f64().unwrap_or(0.0);
        let coeffs = &self.basis[e][b.offset..b.offset + b.count];
        coeffs.iter().rev().fold(0.0, |acc, x| acc * d + x.to_f64().unwrap_or(0.0))
    }

    /// Largest absolute coefficient, used to detect the zero solution.
    pub fn max_abs(&self) -> BigRational {
        self.basis.iter().flatten().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Sample points for span comparisons: `count + 1` interior points on each
/// component with unknowns.
pub fn sample_points(sys: &KernelSystem, length: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for (c, b) in sys.decomposition.components.iter().zip(&sys.unknowns) {
        if b.count == 0 {
            continue;
        }
        let len = c.arc.length(length);
        let m = b.count + 1;
        for i in 0..m {
            let s = (i as f64 + 0.5 + 0.1 * i as f64 / m as f64) / (m as f64 + 0.2);
            let mut t = c.arc.t0 + s * len;
            if t >= length && c.arc.wraps() {
                t -= length;
            }
            pts.push(t);
        }
    }
    pts
}

/// Span residual between the floating basis and the exact basis.
pub fn compare_with_float(
    mu: &VectorialMeasure,
    sys: &KernelSystem,
    float: &[super::poly::PiecewisePolynomial],
    exact: &ExactKernel,
) -> f64 {
    let pts = sample_points(sys, mu.curve().length());
    let a: Vec<Vec<Complex64>> =
        float.iter().map(|g| pts.iter().map(|t| g.eval(mu.curve(), *t, 0)).collect()).collect();
    let b: Vec<Vec<Complex64>> =
        (0..exact.dim).map(|e| pts.iter().map(|t| Complex64::new(exact.eval(sys, e, *t), 0.0)).collect()).collect();
    super::poly::mutual_projection_residual(&a, &b)
}
