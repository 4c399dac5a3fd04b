//! Polynomial zeros as eigenvalues of companion-type matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::FramePoly;
use crate::curve::BasisFrame;
use crate::error::{Error, Result};

/// Leading coefficients below this fraction of the largest one are dropped.
pub const LEADING_TOL: f64 = 1e-12;
/// Other coefficients this small relative to the largest are rounding noise
/// and set to zero, so exact factors `zeta^m` are recognised.
pub const CHOP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub degree: usize,
    pub zeros: Vec<Complex64>,
    /// `|q(z)|` relative to `sum |c_i| max(1, |phi_i(z)|)`, per zero.
    pub residuals: Vec<f64>,
    pub notices: Vec<String>,
}

impl ZeroSet {
    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Zeros of `sum coeffs[i] z^i`.
pub fn poly_zeros(coeffs: &[Complex64]) -> Result<ZeroSet> {
    let frame = BasisFrame::Monomial { center: Complex64::new(0.0, 0.0), scale: Complex64::new(1.0, 0.0) };
    frame_zeros(&FramePoly::new(frame, coeffs.to_vec()))
}

/// Zeros of a polynomial in an adapted frame: the companion matrix for
/// monomials, the colleague matrix for Chebyshev polynomials.
pub fn frame_zeros(p: &FramePoly) -> Result<ZeroSet> {
    let big = p.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut notices = Vec::new();
    let mut n = p.coeffs.len();
    while n > 0 && p.coeffs[n - 1].norm() <= LEADING_TOL * big {
        n -= 1;
    }
    if n < p.coeffs.len() && n > 0 {
        notices.push(format!(
            "degree reduced from {} to {}: negligible leading coefficients",
            p.coeffs.len() - 1,
            n - 1
        ));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("zeros need a polynomial of degree at least 1".into()));
    }
    let orig = FramePoly::new(p.frame, p.coeffs[..n].to_vec());
    let q = FramePoly::new(
        p.frame,
        p.coeffs[..n].iter().map(|x| if x.norm() <= CHOP_TOL * big { Complex64::new(0.0, 0.0) } else { *x }).collect(),
    );
    let (center, scale, cheb) = match p.frame {
        BasisFrame::Chebyshev { center, scale } => (center, scale, true),
        BasisFrame::Monomial { center, scale } => (center, scale, false),
    };
    // zeta^m divides a monomial-frame polynomial with m vanishing low coefficients.
    let low = if cheb { 0 } else { q.coeffs.iter().take_while(|x| x.norm() == 0.0).count() };
    let c = &q.coeffs[low..];
    let deg = c.len() - 1;
    let lead = c[deg];
    let mut zeros = alloc::vec![center; low];
    if deg == 0 {
        let residuals = zeros.iter().map(|z| residual(&orig, *z)).collect();
        return Ok(ZeroSet { degree: low, zeros, residuals, notices });
    }
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    if cheb {
        // zeta (T_0..T_{n-1}) = A (T_0..T_{n-1}) + e_{n-1} s T_n, with T_n
        // eliminated through q = 0.
        for i in 0..deg {
            if i == 0 {
                if deg > 1 {
                    m[(0, 1)] = Complex64::new(1.0, 0.0);
                }
            } else {
                m[(i, i - 1)] = Complex64::new(0.5, 0.0);
                if i + 1 < deg {
                    m[(i, i + 1)] = Complex64::new(0.5, 0.0);
                }
            }
        }
        let s = if deg == 1 { 1.0 } else { 0.5 };
        for k in 0..deg {
            m[(deg - 1, k)] -= c[k] / lead * s;
        }
    } else {
        for i in 1..deg {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for k in 0..deg {
            m[(k, deg - 1)] = -c[k] / lead;
        }
    }
    let eig = eigenvalues(m)?;
    for u in eig.iter() {
        let mut z = center + scale * u;
        let mut r = residual(&q, z);
        // A few Newton steps, kept only while they help.
        for _ in 0..3 {
            let jet = q.jet(z, 1);
            if jet[1].norm() == 0.0 {
                break;
            }
            let z2 = z - jet[0] / jet[1];
            let r2 = residual(&q, z2);
            if !(r2 < r) {
                break;
            }
            z = z2;
            r = r2;
        }
        zeros.push(z);
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals = zeros.iter().map(|z| residual(&orig, *z)).collect();
    Ok(ZeroSet { degree: deg + low, zeros, residuals, notices })
}

/// Eigenvalues through a Schur form with an iteration cap. Real matrices
/// (the usual case for real coefficients) are balanced and use the real
/// Schur form. The deflation test is relative to the diagonal, so it can
/// stall when eigenvalues vanish; shifted copies are tried then.
fn eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let cap = 1000 * n.max(10);
    if m.iter().all(|x| x.im == 0.0) {
        let mut r = m.map(|x| x.re);
        balance_parlett_reinsch(&mut r);
        if let Some(s) = r.try_schur(f64::EPSILON, cap) {
            return Ok(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    for shift in [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.7), Complex64::new(-0.61, 0.29)] {
        let mut a = m.clone();
        for i in 0..n {
            a[(i, i)] += shift;
        }
        if let Some(e) = a.try_schur(f64::EPSILON, cap).and_then(|s| s.eigenvalues()) {
            return Ok(e.iter().map(|z| z - shift).collect());
        }
    }
    Err(Error::Numerical(format!("Schur iteration did not converge for a {n} x {n} matrix")))
}

fn residual(q: &FramePoly, z: Complex64) -> f64 {
    let mag = q.magnitude_at(z);
    if mag == 0.0 {
        0.0
    } else {
        q.eval(z).norm() / mag
    }
}
