//! Floating-point null space of the kernel system and the Sobolev seminorm
//! of piecewise polynomials.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{PiecewisePolynomial, PolyPiece};
use super::system::{ComponentDecomposition, KernelSystem};
use crate::measure::VectorialMeasure;

/// Relative singular-value threshold for the numerical rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub dim: usize,
    /// Orthonormal coefficient vectors, as piecewise polynomials on the
    /// components (zero on components without unknowns).
    pub basis: Vec<PiecewisePolynomial>,
    /// Largest seminorm of a basis element.
    pub residual: f64,
    /// Total mass of the measure, the scale for `residual`.
    pub mass_scale: f64,
    pub singular_values: Vec<f64>,
    /// Ratio between the smallest kept and largest dropped singular value
    /// was below 10.
    pub low_confidence: bool,
    /// Some set entering the system was only approximated.
    pub inexact: bool,
    /// Kernel elements live on `Omega^(0)` (inside the region) only.
    pub coverage: &'static str,
}

/// Null space of the assembled system.
pub fn solve_kernel(mu: &VectorialMeasure, sys: &KernelSystem) -> KernelReport {
    let n = sys.columns;
    let (vectors, singular_values, low_confidence) = null_space(sys, n);
    let basis: Vec<PiecewisePolynomial> = vectors.iter().map(|v| to_piecewise(&sys.decomposition, sys, v)).collect();
    let residual = basis.iter().map(|g| seminorm(mu, &sys.decomposition, g)).fold(0.0, f64::max);
    let mass_scale = mu.masses().iter().sum();
    KernelReport {
        dim: basis.len(),
        basis,
        residual,
        mass_scale,
        singular_values,
        low_confidence,
        inexact: sys.decomposition.inexact,
        coverage: "Omega^(0)",
    }
}

fn null_space(sys: &KernelSystem, n: usize) -> (Vec<Vec<Complex64>>, Vec<f64>, bool) {
    if n == 0 {
        return (Vec::new(), Vec::new(), false);
    }
    let identity =
        || (0..n).map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    if sys.equations.is_empty() {
        return (identity(), Vec::new(), false);
    }
    // Pad to at least n rows so the full right singular basis is returned.
    let m = sys.equations.len().max(n);
    let mut a = DMatrix::<Complex64>::zeros(m, n);
    for (i, eq) in sys.equations.iter().enumerate() {
        for (j, v) in eq.row.iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv[0];
    let thr = RANK_TOL * smax;
    let rank = sv.iter().filter(|s| **s > thr).count();
    let gap = if rank == 0 {
        f64::INFINITY
    } else if rank < sv.len() {
        if sv[rank] == 0.0 {
            f64::INFINITY
        } else {
            sv[rank - 1] / sv[rank]
        }
    } else {
        sv[rank - 1] / thr
    };
    let mut vectors = Vec::new();
    for &i in order.iter().skip(rank) {
        let mut v: Vec<Complex64> = (0..n).map(|j| v_t[(i, j)].conj()).collect();
        // Deterministic phase: largest entry real and positive.
        let big = v
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |acc, x| if x.norm() > acc.norm() + 1e-12 { x } else { acc });
        if big.norm() > 0.0 {
            let ph = big.conj() / big.norm();
            for x in v.iter_mut() {
                *x *= ph;
            }
        }
        vectors.push(v);
    }
    (vectors, sv, gap < 10.0)
}

pub(crate) fn to_piecewise(dec: &ComponentDecomposition, sys: &KernelSystem, v: &[Complex64]) -> PiecewisePolynomial {
    let pieces = dec
        .components
        .iter()
        .zip(&sys.unknowns)
        .map(|(c, b)| PolyPiece {
            arc: c.arc,
            center: c.center,
            scale: c.scale,
            coeffs: v[b.offset..b.offset + b.count].to_vec(),
        })
        .collect();
    PiecewisePolynomial { pieces }
}

/// `||g||_{W^{k,p}}` restricted to `Omega^(0)` (and the region of `dec`),
/// for `g` given on the components of `dec`.
pub fn seminorm(mu: &VectorialMeasure, dec: &ComponentDecomposition, g: &PiecewisePolynomial) -> f64 {
    let p = mu.p();
    let curve = mu.curve();
    let l = curve.length();
    let mut total = 0.0;
    for j in 0..=mu.k() {
        let comp = mu.component(j);
        for piece in &g.pieces {
            if piece.coeffs.len() <= j || piece.coeffs.iter().all(|c| c.norm() == 0.0) {
                continue;
            }
            let f = |t: f64| libm::pow(piece.derivative(curve.point(t), j).norm(), p);
            let arc = piece.arc;
            if arc.full {
                total += comp.integrate_ac(0.0, l, f);
            } else if arc.wraps() {
                total += comp.integrate_ac(arc.t0, l, f);
                total += comp.integrate_ac(0.0, arc.t1, f);
            } else {
                total += comp.integrate_ac(arc.t0, arc.t1, f);
            }
        }
    }
    for a in &dec.norm_atoms {
        let z = curve.point(a.t);
        let v = a
            .components
            .iter()
            .filter_map(|c| g.pieces.get(*c))
            .map(|piece| piece.derivative(z, a.j).norm())
            .fold(0.0, f64::max);
        total += a.mass * libm::pow(v, p);
    }
    libm::pow(total, 1.0 / p)
}
