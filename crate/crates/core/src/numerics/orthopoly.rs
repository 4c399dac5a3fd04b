//! Sobolev orthonormal polynomials by Arnoldi iteration on the quadrature
//! nodes, the compressed multiplication operator and the zero bound.
//!
//! Polynomials are carried as jets `(f, f', ..., f^(j))` at the nodes of
//! `mu_j`; multiplication by `z` acts on jets through
//! `(z f)^(d) = z f^(d) + d f^(d-1)`, so no basis conversion enters the
//! inner products.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{measure_frame, FramePoly};
use super::gram::{require_p2, singular, OrthoBasis, OrthoMethod, PIVOT_TOL};
use super::rule::SobolevRule;
use super::zeros::{frame_zeros, ZeroSet};
use crate::error::{Error, Result};
use crate::measure::VectorialMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Jets of one polynomial: `comps[j][node * (j + 1) + d] = f^(d)(z_node)`.
#[derive(Clone)]
struct Jets {
    comps: Vec<Vec<Complex64>>,
}

impl Jets {
    fn constant(rule: &SobolevRule) -> Jets {
        let comps = rule
            .components
            .iter()
            .enumerate()
            .map(|(j, nodes)| {
                let mut v = vec![ZERO; nodes.len() * (j + 1)];
                for i in 0..nodes.len() {
                    v[i * (j + 1)] = Complex64::new(1.0, 0.0);
                }
                v
            })
            .collect();
        Jets { comps }
    }

    fn from_poly(rule: &SobolevRule, p: &FramePoly) -> Jets {
        let comps = rule
            .components
            .iter()
            .enumerate()
            .map(|(j, nodes)| nodes.iter().flat_map(|n| p.jet(n.z, j)).collect())
            .collect();
        Jets { comps }
    }

    fn times_z(&self, rule: &SobolevRule) -> Jets {
        let comps = rule
            .components
            .iter()
            .enumerate()
            .map(|(j, nodes)| {
                let f = &self.comps[j];
                let mut out = vec![ZERO; f.len()];
                for (i, node) in nodes.iter().enumerate() {
                    let b = i * (j + 1);
                    for d in 0..=j {
                        out[b + d] = node.z * f[b + d] + if d > 0 { f[b + d - 1] * d as f64 } else { ZERO };
                    }
                }
                out
            })
            .collect();
        Jets { comps }
    }

    /// `<self, other> = sum_j sum_nodes w f^(j) conj(g^(j))`.
    fn inner(&self, other: &Jets, rule: &SobolevRule) -> Complex64 {
        let mut total = ZERO;
        for (j, nodes) in rule.components.iter().enumerate() {
            let (f, g) = (&self.comps[j], &other.comps[j]);
            let mut part = ZERO;
            for (i, node) in nodes.iter().enumerate() {
                let b = i * (j + 1) + j;
                part += f[b] * g[b].conj() * node.weight;
            }
            total += part;
        }
        total
    }

    fn axpy(&mut self, s: Complex64, other: &Jets) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }

    fn scale(&mut self, s: f64) {
        for a in self.comps.iter_mut() {
            for x in a.iter_mut() {
                *x *= s;
            }
        }
    }
}

/// `q_0, ..., q_degree` by orthogonalising `z q_n` against the previous
/// polynomials (twice, for stability). Orthonormality is re-checked with an
/// independent rule.
pub fn orthonormal_basis(mu: &VectorialMeasure, degree: usize) -> Result<OrthoBasis> {
    require_p2(mu)?;
    let frame = measure_frame(mu);
    let rule = SobolevRule::new(mu, degree + mu.k(), 0);
    let mut q = Jets::constant(&rule);
    let n0 = q.inner(&q, &rule).re;
    let total: f64 = mu.masses().iter().sum();
    if !(n0 > PIVOT_TOL * total) {
        return Err(singular(0, &FramePoly::constant(frame, Complex64::new(1.0, 0.0))));
    }
    let s0 = libm::sqrt(n0);
    q.scale(1.0 / s0);
    let mut jets = vec![q];
    let mut polys = vec![FramePoly::constant(frame, Complex64::new(1.0 / s0, 0.0))];
    let mut norms = vec![s0];
    let mut h = vec![vec![ZERO; degree]; degree + 1];
    for n in 0..degree {
        let mut v = jets[n].times_z(&rule);
        let mut vp = polys[n].times_z();
        let before = v.inner(&v, &rule).re;
        for _ in 0..2 {
            for m in 0..=n {
                let c = v.inner(&jets[m], &rule);
                h[m][n] += c;
                v.axpy(-c, &jets[m]);
                vp.axpy(-c, &polys[m]);
            }
        }
        let after = v.inner(&v, &rule).re;
        if !(after > PIVOT_TOL * before) {
            return Err(singular(n + 1, &vp));
        }
        let s = libm::sqrt(after);
        h[n + 1][n] = Complex64::new(s, 0.0);
        v.scale(1.0 / s);
        jets.push(v);
        polys.push(vp.scaled(Complex64::new(1.0 / s, 0.0)));
        norms.push(s);
    }
    let mut basis = OrthoBasis {
        frame,
        method: OrthoMethod::Arnoldi,
        polys,
        norms,
        hessenberg: Some(h),
        orthonormality_residual: None,
    };
    basis.verify(mu);
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub n: usize,
    pub sigma_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultOpReport {
    pub n: usize,
    /// `M[m][n] = <z q_n, q_m>`, `m, n <= N`.
    pub matrix: Vec<Vec<Complex64>>,
    /// Largest singular value of `M`: a lower bound for the operator norm.
    pub sigma_max: f64,
    /// `sigma_max` of the leading sections `N' = 8, 16, 32, ...` and `N`.
    pub history: Vec<SigmaPoint>,
    /// Zero sets of `q_1, ..., q_{n_max}` (empty unless requested).
    pub zeros: Vec<ZeroSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_zero_modulus: Option<f64>,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthonormality_residual: Option<f64>,
}

fn sigma(m: &[Vec<Complex64>], n: usize) -> Result<f64> {
    let a = DMatrix::from_fn(n + 1, n + 1, |i, k| m[i][k]);
    let svd = a
        .try_svd(false, false, f64::EPSILON, 1000 * (n + 1).max(10))
        .ok_or_else(|| Error::Numerical(format!("SVD did not converge for the {n}-section")))?;
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}

/// Sections at which the growth of `sigma_max` is recorded.
pub fn history_sizes(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut s = 8;
    while s < n {
        out.push(s);
        s *= 2;
    }
    out.push(n);
    out
}

/// `<z q_n, q_m>` for `m, n <= N`, recomputed from the coefficients of the
/// basis (which must reach degree `N + 1`).
pub fn multiplication_matrix(mu: &VectorialMeasure, basis: &OrthoBasis, n: usize) -> Result<MultOpReport> {
    require_p2(mu)?;
    if basis.degree() < n + 1 {
        return Err(Error::InvalidArgument("the multiplication matrix needs the basis up to degree N + 1".into()));
    }
    let rule = SobolevRule::new(mu, n + 1 + mu.k(), 0);
    let jets: Vec<Jets> = basis.polys[..=n].iter().map(|p| Jets::from_poly(&rule, p)).collect();
    let mut m = vec![vec![ZERO; n + 1]; n + 1];
    for (c, q) in jets.iter().enumerate() {
        let zq = q.times_z(&rule);
        for (r, qm) in jets.iter().enumerate() {
            m[r][c] = zq.inner(qm, &rule);
        }
    }
    let history = history_sizes(n)
        .into_iter()
        .map(|s| Ok(SigmaPoint { n: s, sigma_max: sigma(&m, s)? }))
        .collect::<Result<Vec<SigmaPoint>>>()?;
    let sigma_max = history.last().map_or(0.0, |p| p.sigma_max);
    Ok(MultOpReport {
        n,
        matrix: m,
        sigma_max,
        history,
        zeros: Vec::new(),
        bound_ok: None,
        max_zero_modulus: None,
        tol: 0.0,
        orthonormality_residual: basis.orthonormality_residual,
    })
}

/// Zeros of `q_1, ..., q_{n_max}` against `sigma_max(M_N) (1 + tol)`.
///
/// Only `sigma_max(M_N) <= ||M||` is known, so a zero outside the disk of
/// radius `sigma_max(M_N) (1 + tol)` means either `M` is unbounded or the
/// section is too small.
pub fn verify_zero_bound(mu: &VectorialMeasure, n_max: usize, n: usize, tol: f64) -> Result<MultOpReport> {
    let basis = orthonormal_basis(mu, n_max.max(n + 1))?;
    let mut report = multiplication_matrix(mu, &basis, n)?;
    let mut zeros = Vec::with_capacity(n_max);
    for q in &basis.polys[1..=n_max] {
        zeros.push(frame_zeros(q)?);
    }
    let biggest = zeros.iter().map(|z| z.max_modulus()).fold(0.0, f64::max);
    report.bound_ok = Some(biggest <= report.sigma_max * (1.0 + tol));
    report.max_zero_modulus = Some(biggest);
    report.zeros = zeros;
    report.tol = tol;
    Ok(report)
}
