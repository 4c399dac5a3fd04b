//! The adapted polynomial basis and polynomials expressed in it.
//!
//! With `zeta = (z - center) / scale` the basis is `T_i(zeta)` (Chebyshev)
//! on curves close to a segment and `zeta^i` on circles.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{BasisFrame, CurveKind};
use crate::measure::VectorialMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn parts(frame: &BasisFrame) -> (Complex64, Complex64, bool) {
    match *frame {
        BasisFrame::Chebyshev { center, scale } => (center, scale, true),
        BasisFrame::Monomial { center, scale } => (center, scale, false),
    }
}

/// `d^d/dz^d phi_i(z)` for `i < count`, `d <= order`, as `out[d][i]`.
pub fn basis_jets(frame: &BasisFrame, count: usize, order: usize, z: Complex64) -> Vec<Vec<Complex64>> {
    let (center, scale, cheb) = parts(frame);
    let u = (z - center) / scale;
    let mut out = vec![vec![ZERO; count]; order + 1];
    if count == 0 {
        return out;
    }
    if cheb {
        // T_{i+1}^(d) = 2 u T_i^(d) + 2 d T_i^(d-1) - T_{i-1}^(d)
        for d in 0..=order {
            for i in 0..count {
                out[d][i] = match i {
                    0 => {
                        if d == 0 {
                            ONE
                        } else {
                            ZERO
                        }
                    }
                    1 => match d {
                        0 => u,
                        1 => ONE,
                        _ => ZERO,
                    },
                    _ => {
                        let lower = if d > 0 { out[d - 1][i - 1] * (2.0 * d as f64) } else { ZERO };
                        out[d][i - 1] * u * 2.0 + lower - out[d][i - 2]
                    }
                };
            }
        }
    } else {
        let mut pw = vec![ONE; count];
        for i in 1..count {
            pw[i] = pw[i - 1] * u;
        }
        for d in 0..=order {
            for i in d..count {
                let mut f = 1.0;
                for m in 0..d {
                    f *= (i - m) as f64;
                }
                out[d][i] = pw[i - d] * f;
            }
        }
    }
    // d/dz = (1/scale) d/du
    let mut s = ONE;
    for row in out.iter_mut().skip(1) {
        s /= scale;
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

/// A polynomial `sum coeffs[i] phi_i` in an adapted frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePoly {
    pub frame: BasisFrame,
    pub coeffs: Vec<Complex64>,
}

impl FramePoly {
    pub fn new(frame: BasisFrame, coeffs: Vec<Complex64>) -> FramePoly {
        FramePoly { frame, coeffs }
    }

    pub fn constant(frame: BasisFrame, c: Complex64) -> FramePoly {
        FramePoly { frame, coeffs: vec![c] }
    }

    /// Converts `sum m[i] z^i`.
    pub fn from_monomial(frame: BasisFrame, m: &[Complex64]) -> FramePoly {
        let mut p = FramePoly { frame, coeffs: vec![ZERO] };
        for c in m.iter().rev() {
            p = p.times_z();
            p.coeffs[0] += c;
        }
        p.trim();
        p
    }

    /// Coefficients of `z^i`.
    pub fn to_monomial(&self) -> Vec<Complex64> {
        let (center, scale, cheb) = parts(&self.frame);
        let n = self.coeffs.len();
        // zeta as a polynomial in z.
        let zeta = [-center / scale, ONE / scale];
        let mul = |a: &[Complex64], b: &[Complex64]| {
            let mut out = vec![ZERO; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let mut out = vec![ZERO; n.max(1)];
        let mut prev: Vec<Complex64> = vec![ONE];
        let mut cur: Vec<Complex64> = zeta.to_vec();
        for (i, c) in self.coeffs.iter().enumerate() {
            let b = if i == 0 { vec![ONE] } else { cur.clone() };
            for (k, v) in b.iter().enumerate() {
                out[k] += c * v;
            }
            if i >= 1 {
                let mut next = mul(&cur, &zeta);
                if cheb {
                    for v in next.iter_mut() {
                        *v *= 2.0;
                    }
                    for (k, v) in prev.iter().enumerate() {
                        next[k] -= v;
                    }
                }
                prev = core::mem::replace(&mut cur, next);
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    fn trim(&mut self) {
        let d = self.degree();
        self.coeffs.truncate(d + 1);
    }

    /// `z` times this polynomial.
    pub fn times_z(&self) -> FramePoly {
        let (center, scale, cheb) = parts(&self.frame);
        let n = self.coeffs.len();
        let mut out = vec![ZERO; n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c * center;
            let c = c * scale;
            if !cheb || i == 0 {
                out[i + 1] += c;
            } else {
                out[i + 1] += c * 0.5;
                out[i - 1] += c * 0.5;
            }
        }
        FramePoly { frame: self.frame, coeffs: out }
    }

    pub fn scaled(&self, s: Complex64) -> FramePoly {
        FramePoly { frame: self.frame, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other` (same frame).
    pub fn axpy(&mut self, s: Complex64, other: &FramePoly) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), ZERO);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// `f, f', ..., f^(order)` at `z`.
    pub fn jet(&self, z: Complex64, order: usize) -> Vec<Complex64> {
        let b = basis_jets(&self.frame, self.coeffs.len(), order, z);
        b.iter().map(|row| row.iter().zip(&self.coeffs).map(|(x, c)| x * c).sum()).collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.jet(z, 0)[0]
    }

    /// `sum |coeffs[i]| max(1, |phi_i(z)|)`, the size against which
    /// `|f(z)|` is small. The floor keeps it meaningful where many `phi_i`
    /// vanish at once (odd Chebyshev polynomials at the centre).
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let b = basis_jets(&self.frame, self.coeffs.len(), 0, z);
        b[0].iter().zip(&self.coeffs).map(|(x, c)| x.norm().max(1.0) * c.norm()).sum()
    }
}

/// Frame adapted to where `mu` lives: the curve frame for circles, else
/// the Chebyshev frame of the part of the curve carrying mass. A frame
/// wider than the support makes the coefficients of orthonormal
/// polynomials grow geometrically with the degree.
pub fn measure_frame(mu: &VectorialMeasure) -> BasisFrame {
    let curve = mu.curve();
    let frame = curve.basis_frame();
    if let BasisFrame::Monomial { .. } = frame {
        return frame;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for comp in mu.components() {
        for p in comp.pieces.iter().filter(|p| !p.is_zero()) {
            lo = lo.min(p.arc.t0);
            hi = hi.max(p.arc.t1);
        }
        for a in &comp.atoms {
            lo = lo.min(a.t);
            hi = hi.max(a.t);
        }
    }
    if !(hi > lo) {
        return frame;
    }
    let (za, zb) = (curve.point(lo), curve.point(hi));
    match curve.kind() {
        CurveKind::Segment { .. } => BasisFrame::Chebyshev { center: (za + zb) * 0.5, scale: (zb - za) * 0.5 },
        _ => {
            let pts: Vec<Complex64> = [za, zb]
                .into_iter()
                .chain(curve.corners().into_iter().filter(|t| *t > lo && *t < hi).map(|t| curve.point(t)))
                .collect();
            let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for v in &pts {
                lo_re = lo_re.min(v.re);
                hi_re = hi_re.max(v.re);
                lo_im = lo_im.min(v.im);
                hi_im = hi_im.max(v.im);
            }
            let center = Complex64::new(0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im));
            let half = 0.5 * libm::hypot(hi_re - lo_re, hi_im - lo_im);
            BasisFrame::Chebyshev { center, scale: Complex64::new(half, 0.0) }
        }
    }
}
