//! Piecewise polynomials in `z` on arcs of a curve.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::weight::ArcComponent;

/// `i (i-1) ... (i-j+1)`.
pub(crate) fn falling(i: usize, j: usize) -> f64 {
    (i + 1 - j..=i).map(|x| x as f64).product()
}

/// A polynomial `sum_i c_i ((z - center) / scale)^i` on one arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPiece {
    pub arc: ArcComponent,
    pub center: Complex64,
    pub scale: f64,
    pub coeffs: Vec<Complex64>,
}

impl PolyPiece {
    /// `d^order/dz^order` at `z`.
    pub fn derivative(&self, z: Complex64, order: usize) -> Complex64 {
        let n = self.coeffs.len();
        if order >= n {
            return Complex64::new(0.0, 0.0);
        }
        let u = (z - self.center) / self.scale;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (order..n).rev() {
            acc = acc * u + self.coeffs[i] * falling(i, order);
        }
        acc / libm::pow(self.scale, order as f64)
    }

    /// Row of `d^order/dz^order` at `z` against the coefficients, multiplied
    /// by `scale^order`.
    pub(crate) fn derivative_row(
        center: Complex64,
        scale: f64,
        count: usize,
        z: Complex64,
        order: usize,
    ) -> Vec<Complex64> {
        let u = (z - center) / scale;
        (0..count)
            .map(|i| if i < order { Complex64::new(0.0, 0.0) } else { u.powu((i - order) as u32) * falling(i, order) })
            .collect()
    }

    /// `z` times this polynomial, in the same frame.
    pub fn times_z(&self) -> PolyPiece {
        let n = self.coeffs.len();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c * self.center;
            out[i + 1] += c * self.scale;
        }
        PolyPiece { coeffs: out, ..self.clone() }
    }
}

/// A function that is a polynomial on each arc and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PiecewisePolynomial {
    pub pieces: Vec<PolyPiece>,
}

impl PiecewisePolynomial {
    /// Index of the piece whose closure contains `t`.
    pub fn piece_index(&self, t: f64) -> Option<usize> {
        self.pieces
            .iter()
            .position(|p| p.arc.contains(t))
            .or_else(|| self.pieces.iter().position(|p| p.arc.closure_contains(t)))
    }

    /// `d^order/dz^order` at parameter `t` (zero off the pieces).
    pub fn eval(&self, curve: &Curve, t: f64, order: usize) -> Complex64 {
        match self.piece_index(t) {
            Some(i) => self.pieces[i].derivative(curve.point(t), order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn times_z(&self) -> PiecewisePolynomial {
        PiecewisePolynomial { pieces: self.pieces.iter().map(|p| p.times_z()).collect() }
    }

    pub fn max_coeff(&self) -> f64 {
        self.pieces.iter().flat_map(|p| p.coeffs.iter()).map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> PiecewisePolynomial {
        PiecewisePolynomial {
            pieces: self
                .pieces
                .iter()
                .map(|p| PolyPiece { coeffs: p.coeffs.iter().map(|c| c * s).collect(), ..p.clone() })
                .collect(),
        }
    }
}

/// Largest relative residual of projecting each column of one sample set
/// onto the span of the other, in both directions. Columns are sample
/// vectors of functions at common points.
pub fn mutual_projection_residual(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    one_way(a, b).max(one_way(b, a))
}

/// Relative residual of projecting `v` onto the span of `basis`.
pub fn projection_residual(basis: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
    one_way(&[v.to_vec()], basis)
}

fn one_way(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let q = orthonormalize(b);
    let mut worst: f64 = 0.0;
    for v in a {
        let norm = libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if norm == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for e in &q {
                let c: Complex64 = e.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, ei) in r.iter_mut().zip(e) {
                    *ri -= c * ei;
                }
            }
        }
        let res = libm::sqrt(r.iter().map(|x| x.norm_sqr()).sum::<f64>()) / norm;
        worst = worst.max(res);
    }
    worst
}

/// Modified Gram–Schmidt with reorthogonalisation; drops dependent columns.
pub(crate) fn orthonormalize(cols: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let scale = cols.iter().map(|v| libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>())).fold(0.0, f64::max);
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    for v in cols {
        let mut r = v.clone();
        for _ in 0..2 {
            for e in &q {
                let c: Complex64 = e.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, ei) in r.iter_mut().zip(e) {
                    *ri -= c * ei;
                }
            }
        }
        let n = libm::sqrt(r.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if n > 1e-12 * scale && n > 0.0 {
            q.push(r.into_iter().map(|x| x / n).collect());
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn arc() -> ArcComponent {
        ArcComponent { t0: 0.0, t1: 2.0, start_closed: true, end_closed: true, full: false }
    }

    #[test]
    fn derivatives_in_a_scaled_frame() {
        // (z - 1)^2 / 4 written in the frame center 1, scale 2: u^2.
        let p = PolyPiece {
            arc: arc(),
            center: Complex64::new(1.0, 0.0),
            scale: 2.0,
            coeffs: vec![0.0.into(), 0.0.into(), 1.0.into()],
        };
        let z = Complex64::new(3.0, 0.0);
        assert!((p.derivative(z, 0) - 1.0).norm() < 1e-15);
        assert!((p.derivative(z, 1) - 1.0).norm() < 1e-15);
        assert!((p.derivative(z, 2) - 0.5).norm() < 1e-15);
        assert_eq!(p.derivative(z, 3), Complex64::new(0.0, 0.0));
        let q = p.times_z();
        assert!((q.derivative(z, 0) - 3.0).norm() < 1e-14);
    }

    #[test]
    fn projection_residual_detects_span() {
        let a = vec![vec![1.0.into(), 0.0.into(), 1.0.into()]];
        let b = vec![vec![2.0.into(), 0.0.into(), 2.0.into()], vec![0.0.into(), 1.0.into(), 0.0.into()]];
        assert!(one_way(&a, &b) < 1e-15);
        assert!(mutual_projection_residual(&a, &b) > 0.5);
    }
}
