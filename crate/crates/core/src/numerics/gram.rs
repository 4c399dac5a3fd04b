//! Sobolev inner products and norms of polynomials, Gram matrices in the
//! adapted basis and their Cholesky orthonormalisation (`p = 2`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{basis_jets, measure_frame, FramePoly};
use super::rule::{integrate_weighted, SobolevRule};
use crate::curve::{Arc, BasisFrame};
use crate::error::{Error, Result};
use crate::measure::VectorialMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pivot threshold of the factorisation, relative to the mean diagonal of
/// the equilibrated matrix.
pub const PIVOT_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-12;

pub(crate) fn require_p2(mu: &VectorialMeasure) -> Result<()> {
    if mu.p() != 2.0 {
        return Err(Error::Unsupported(format!("inner products need p = 2, got p = {}", mu.p())));
    }
    Ok(())
}

fn whole(mu: &VectorialMeasure) -> Arc {
    Arc::new(0.0, mu.curve().length())
}

/// `sum_j int f^(j) conj(g^(j)) dmu_j`, by adaptive quadrature.
pub fn sobolev_inner(mu: &VectorialMeasure, f: &FramePoly, g: &FramePoly) -> Result<Complex64> {
    require_p2(mu)?;
    let curve = mu.curve();
    let mut total = ZERO;
    for (j, comp) in mu.components().iter().enumerate() {
        let term = |z: Complex64| f.jet(z, j)[j] * g.jet(z, j)[j].conj();
        total += integrate_weighted(curve, whole(mu), comp, term, QUAD_TOL)?.value;
        for a in &comp.atoms {
            total += term(curve.point(a.t)) * a.mass;
        }
    }
    Ok(total)
}

/// `(sum_j int |f^(j)|^p dmu_j)^(1/p)`.
pub fn sobolev_norm(mu: &VectorialMeasure, f: &FramePoly) -> Result<f64> {
    let p = mu.p();
    let curve = mu.curve();
    let mut total = 0.0;
    for (j, comp) in mu.components().iter().enumerate() {
        let term = |z: Complex64| libm::pow(f.jet(z, j)[j].norm(), p);
        total += integrate_weighted(curve, whole(mu), comp, |z| Complex64::new(term(z), 0.0), QUAD_TOL)?.value.re;
        for a in &comp.atoms {
            total += term(curve.point(a.t)) * a.mass;
        }
    }
    Ok(libm::pow(total, 1.0 / p))
}

/// `G[m][n] = <phi_m, phi_n>` for `m, n <= n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    /// Largest degree.
    pub n: usize,
    pub frame: BasisFrame,
    pub entries: Vec<Vec<Complex64>>,
    /// Largest change of an entry under a finer rule, relative to the
    /// largest diagonal entry.
    pub quadrature_error: f64,
}

/// Gram matrix of `coeffs` (each a polynomial in `frame`) under `rule`.
pub(crate) fn gram_of(
    mu: &VectorialMeasure,
    rule: &SobolevRule,
    frame: &BasisFrame,
    polys: &[Vec<Complex64>],
) -> Vec<Vec<Complex64>> {
    let count = polys.iter().map(|p| p.len()).max().unwrap_or(0);
    let n = polys.len();
    let mut g = vec![vec![ZERO; n]; n];
    for (j, nodes) in rule.components.iter().enumerate() {
        if j > mu.k() {
            break;
        }
        for node in nodes {
            let b = basis_jets(frame, count, j, node.z);
            let vals: Vec<Complex64> = polys.iter().map(|c| c.iter().zip(&b[j]).map(|(x, y)| x * y).sum()).collect();
            for m in 0..n {
                let vm = vals[m] * node.weight;
                for (k, vk) in vals.iter().enumerate() {
                    g[m][k] += vm * vk.conj();
                }
            }
        }
    }
    g
}

fn unit_polys(n: usize) -> Vec<Vec<Complex64>> {
    (0..=n)
        .map(|i| {
            let mut c = vec![ZERO; i + 1];
            c[i] = Complex64::new(1.0, 0.0);
            c
        })
        .collect()
}

pub fn gram_matrix(mu: &VectorialMeasure, n: usize) -> Result<GramMatrix> {
    require_p2(mu)?;
    let frame = measure_frame(mu);
    let polys = unit_polys(n);
    let entries = gram_of(mu, &SobolevRule::new(mu, n + mu.k(), 0), &frame, &polys);
    let check = gram_of(mu, &SobolevRule::new(mu, n + mu.k(), 17), &frame, &polys);
    let diag = (0..=n).map(|i| entries[i][i].re).fold(0.0, f64::max);
    let mut err: f64 = 0.0;
    for (r1, r2) in entries.iter().zip(&check) {
        for (a, b) in r1.iter().zip(r2) {
            err = err.max((a - b).norm());
        }
    }
    Ok(GramMatrix { n, frame, entries, quadrature_error: if diag > 0.0 { err / diag } else { err } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoMethod {
    /// Orthogonalisation of `z q_n` against `q_0, ..., q_n` on the nodes.
    Arnoldi,
    Cholesky,
}

/// Orthonormal polynomials `q_0, ..., q_n` in the adapted basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoBasis {
    pub frame: BasisFrame,
    pub method: OrthoMethod,
    /// `q_i` (its coefficient vector has length `i + 1`).
    pub polys: Vec<FramePoly>,
    /// Norm of the part of `phi_i` (Cholesky) or `z q_{i-1}` (Arnoldi) left
    /// after removing lower degrees; `norms[0] = ||1||`.
    pub norms: Vec<f64>,
    /// `<z q_n, q_m>` from the construction (Arnoldi only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessenberg: Option<Vec<Vec<Complex64>>>,
    /// `max |<q_m, q_n> - delta_mn|` under an independent finer rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthonormality_residual: Option<f64>,
}

impl OrthoBasis {
    pub fn degree(&self) -> usize {
        self.polys.len() - 1
    }

    /// Upper-triangular matrix whose column `i` holds the coefficients of `q_i`.
    pub fn coefficient_matrix(&self) -> Vec<Vec<Complex64>> {
        let n = self.polys.len();
        let mut c = vec![vec![ZERO; n]; n];
        for (i, q) in self.polys.iter().enumerate() {
            for (m, v) in q.coeffs.iter().enumerate() {
                c[m][i] = *v;
            }
        }
        c
    }

    /// Recomputes `<q_m, q_n>` with a rule independent of the construction.
    pub fn verify(&mut self, mu: &VectorialMeasure) -> f64 {
        let polys: Vec<Vec<Complex64>> = self.polys.iter().map(|q| q.coeffs.clone()).collect();
        let rule = SobolevRule::new(mu, self.degree() + mu.k(), 17);
        let g = gram_of(mu, &rule, &self.frame, &polys);
        let mut r: f64 = 0.0;
        for (m, row) in g.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let want = if m == n { 1.0 } else { 0.0 };
                r = r.max((v - want).norm());
            }
        }
        self.orthonormality_residual = Some(r);
        r
    }
}

pub(crate) fn singular(degree: usize, poly: &FramePoly) -> Error {
    Error::GramSingular { degree, null_polynomial: poly.to_monomial() }
}

/// Cholesky factorisation `conj(G) = L L^*` after symmetric diagonal
/// scaling; `q = phi L^(-*)`.
pub fn ortho_from_gram(g: &GramMatrix) -> Result<OrthoBasis> {
    let n = g.n + 1;
    // conj(G) is the matrix of the form c -> sum c_m conj(c_n) <phi_n, phi_m>.
    let a = DMatrix::from_fn(n, n, |i, k| g.entries[i][k].conj());
    let mut d = vec![0.0; n];
    for i in 0..n {
        let v = a[(i, i)].re;
        if !(v > 0.0) {
            let mut c = vec![ZERO; i + 1];
            c[i] = Complex64::new(1.0, 0.0);
            return Err(singular(i, &FramePoly::new(g.frame, c)));
        }
        d[i] = libm::sqrt(v);
    }
    let ah = DMatrix::from_fn(n, n, |i, k| a[(i, k)] / (d[i] * d[k]));
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        for k in 0..i {
            let mut s = ah[(i, k)];
            for m in 0..k {
                s -= l[(i, m)] * l[(k, m)].conj();
            }
            l[(i, k)] = s / l[(k, k)];
        }
        let mut piv = ah[(i, i)].re;
        for m in 0..i {
            piv -= l[(i, m)].norm_sqr();
        }
        if piv < PIVOT_TOL {
            // Null vector [-L1^(-*) b; 1] of the leading block, unscaled.
            let b = DMatrix::from_fn(i, 1, |m, _| l[(i, m)]);
            let l1 = l.view((0, 0), (i, i)).into_owned();
            let x = l1
                .adjoint()
                .solve_upper_triangular(&b)
                .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
            let mut c: Vec<Complex64> = (0..i).map(|m| -x[(m, 0)] / d[m]).collect();
            c.push(Complex64::new(1.0 / d[i], 0.0));
            return Err(singular(i, &FramePoly::new(g.frame, c)));
        }
        l[(i, i)] = Complex64::new(libm::sqrt(piv), 0.0);
        norms.push(libm::sqrt(piv) * d[i]);
    }
    let inv = l
        .adjoint()
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let polys = (0..n).map(|i| FramePoly::new(g.frame, (0..=i).map(|m| inv[(m, i)] / d[m]).collect())).collect();
    Ok(OrthoBasis {
        frame: g.frame,
        method: OrthoMethod::Cholesky,
        polys,
        norms,
        hessenberg: None,
        orthonormality_residual: None,
    })
}
