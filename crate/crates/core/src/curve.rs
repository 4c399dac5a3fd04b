//! Rectifiable simple curves parametrised by arc length.
//!
//! Every curve is stored with its arc-length parameter `t` running over
//! `[0, L]`. Closed curves identify `0` with `L` and are positively oriented.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric description of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    CircleArc {
        center: Complex64,
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
    FullCircle {
        center: Complex64,
        radius: f64,
    },
    /// A polyline; it is closed when the last vertex repeats the first one.
    Polyline {
        vertices: Vec<Complex64>,
    },
}

/// A validated curve together with its arc-length data.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    length: f64,
    closed: bool,
    /// Cumulative arc length at each polyline vertex (empty for other kinds).
    knots: Vec<f64>,
}

/// A parameter arc `[t0, t1]`. On a closed curve `t1 < t0` wraps through `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub t0: f64,
    pub t1: f64,
}

impl Arc {
    pub fn new(t0: f64, t1: f64) -> Self {
        Arc { t0, t1 }
    }
}

/// Frame used by the adapted polynomial basis: `zeta = (z - center) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisFrame {
    /// Chebyshev polynomials in `zeta`; the curve sits near `[-1, 1]`.
    Chebyshev { center: Complex64, scale: Complex64 },
    /// Monomials in `zeta`; the curve lies on the unit circle.
    Monomial { center: Complex64, scale: Complex64 },
}

fn finite_c(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn rem_euclid(t: f64, l: f64) -> f64 {
    let r = t - l * libm::floor(t / l);
    if r < 0.0 {
        0.0
    } else {
        r
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Closed-segment intersection test with a relative tolerance.
fn segments_meet(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64, eps: f64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)) {
        return true;
    }
    let on = |a: Complex64, b: Complex64, c: Complex64, d: f64| {
        d.abs() <= eps
            && c.re >= a.re.min(b.re) - eps
            && c.re <= a.re.max(b.re) + eps
            && c.im >= a.im.min(b.im) - eps
            && c.im <= a.im.max(b.im) + eps
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl Curve {
    pub fn segment(a: Complex64, b: Complex64) -> Result<Curve> {
        Curve::new(CurveKind::Segment { a, b })
    }

    pub fn circle_arc(center: Complex64, radius: f64, theta0: f64, theta1: f64) -> Result<Curve> {
        Curve::new(CurveKind::CircleArc { center, radius, theta0, theta1 })
    }

    pub fn full_circle(center: Complex64, radius: f64) -> Result<Curve> {
        Curve::new(CurveKind::FullCircle { center, radius })
    }

    pub fn polyline(vertices: Vec<Complex64>) -> Result<Curve> {
        Curve::new(CurveKind::Polyline { vertices })
    }

    /// Validates a curve description and precomputes its arc-length data.
    pub fn new(kind: CurveKind) -> Result<Curve> {
        let length = match &kind {
            CurveKind::Segment { a, b } => {
                if !finite_c(*a) || !finite_c(*b) {
                    return Err(Error::InvalidCurve("segment endpoints must be finite".into()));
                }
                let length = (b - a).norm();
                if length == 0.0 {
                    return Err(Error::ZeroLength);
                }
                length
            }
            CurveKind::CircleArc { center, radius, theta0, theta1 } => {
                if !finite_c(*center) || !radius.is_finite() || !theta0.is_finite() || !theta1.is_finite() {
                    return Err(Error::InvalidCurve("circle arc data must be finite".into()));
                }
                if *radius <= 0.0 {
                    return Err(Error::InvalidCurve("radius must be positive".into()));
                }
                let sweep = (theta1 - theta0).abs();
                if sweep == 0.0 {
                    return Err(Error::ZeroLength);
                }
                if sweep >= 2.0 * PI {
                    return Err(Error::InvalidCurve(
                        "circle arc must sweep less than a full turn; use full_circle".into(),
                    ));
                }
                radius * sweep
            }
            CurveKind::FullCircle { center, radius } => {
                if !finite_c(*center) || !radius.is_finite() {
                    return Err(Error::InvalidCurve("circle data must be finite".into()));
                }
                if *radius <= 0.0 {
                    return Err(Error::InvalidCurve("radius must be positive".into()));
                }
                2.0 * PI * radius
            }
            CurveKind::Polyline { vertices } => return Curve::validate_polyline(vertices),
        };
        let closed = matches!(kind, CurveKind::FullCircle { .. });
        Ok(Curve { kind, length, closed, knots: Vec::new() })
    }

    fn validate_polyline(vertices: &[Complex64]) -> Result<Curve> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("polyline needs at least two vertices".into()));
        }
        if vertices.iter().any(|v| !finite_c(*v)) {
            return Err(Error::InvalidCurve("polyline vertices must be finite".into()));
        }
        let mut knots = Vec::with_capacity(vertices.len());
        knots.push(0.0);
        for w in vertices.windows(2) {
            let d = (w[1] - w[0]).norm();
            if d == 0.0 {
                return Err(Error::InvalidCurve("consecutive polyline vertices coincide".into()));
            }
            let last = *knots.last().unwrap();
            knots.push(last + d);
        }
        let length = *knots.last().unwrap();
        let diam = vertices.iter().map(|v| (v - vertices[0]).norm()).fold(0.0, f64::max);
        let tol = 1e-12 * diam.max(1.0);
        let n = vertices.len();
        let closed = n >= 4 && (vertices[n - 1] - vertices[0]).norm() <= tol;
        if n == 3 && (vertices[2] - vertices[0]).norm() <= tol {
            return Err(Error::InvalidCurve("closed polyline needs at least three distinct vertices".into()));
        }
        let segs = n - 1;
        let eps = 1e-12 * diam.max(1.0) * diam.max(1.0);
        for i in 0..segs {
            for j in (i + 1)..segs {
                let adjacent = j == i + 1 || (closed && i == 0 && j == segs - 1);
                let (p1, p2, q1, q2) = (vertices[i], vertices[i + 1], vertices[j], vertices[j + 1]);
                if adjacent {
                    // Adjacent segments share a vertex; they must not fold back.
                    let (shared, a, b) = if j == i + 1 { (p2, p1, q2) } else { (p1, p2, q1) };
                    let u = a - shared;
                    let v = b - shared;
                    if cross(u, v).abs() <= eps && (u.re * v.re + u.im * v.im) > 0.0 {
                        return Err(Error::SelfIntersection { first: i, second: j });
                    }
                } else if segments_meet(p1, p2, q1, q2, eps) {
                    return Err(Error::SelfIntersection { first: i, second: j });
                }
            }
        }
        if closed {
            let mut area = 0.0;
            for w in vertices.windows(2) {
                area += cross(w[0], w[1]);
            }
            if area <= 0.0 {
                return Err(Error::InvalidCurve("closed polyline must be positively oriented".into()));
            }
        }
        Ok(Curve { kind: CurveKind::Polyline { vertices: vertices.to_vec() }, length, closed, knots })
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Reduces a parameter of a closed curve into `[0, L)`.
    pub fn wrap(&self, t: f64) -> f64 {
        if self.closed {
            let r = rem_euclid(t, self.length);
            if r >= self.length {
                0.0
            } else {
                r
            }
        } else {
            t
        }
    }

    fn check(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::OutOfRange { t, length: self.length });
        }
        if self.closed {
            return Ok(self.wrap(t));
        }
        let slack = 1e-12 * self.length;
        if t < -slack || t > self.length + slack {
            return Err(Error::OutOfRange { t, length: self.length });
        }
        Ok(t.clamp(0.0, self.length))
    }

    /// Point of the curve at arc-length parameter `t`.
    pub fn point_at(&self, t: f64) -> Result<Complex64> {
        let t = self.check(t)?;
        Ok(self.point(t))
    }

    /// Unchecked evaluation; `t` is clamped (open) or wrapped (closed).
    pub fn point(&self, t: f64) -> Complex64 {
        let t = if self.closed { self.wrap(t) } else { t.clamp(0.0, self.length) };
        match &self.kind {
            CurveKind::Segment { a, b } => a + (b - a) * (t / self.length),
            CurveKind::CircleArc { center, radius, theta0, theta1 } => {
                let dir = if theta1 > theta0 { 1.0 } else { -1.0 };
                center + Complex64::from_polar(*radius, theta0 + dir * t / radius)
            }
            CurveKind::FullCircle { center, radius } => center + Complex64::from_polar(*radius, t / radius),
            CurveKind::Polyline { vertices } => {
                let i = self.polyline_segment(t);
                let h = self.knots[i + 1] - self.knots[i];
                vertices[i] + (vertices[i + 1] - vertices[i]) * ((t - self.knots[i]) / h)
            }
        }
    }

    fn polyline_segment(&self, t: f64) -> usize {
        let segs = self.knots.len() - 1;
        let i = self.knots.partition_point(|&k| k <= t);
        i.saturating_sub(1).min(segs - 1)
    }

    /// Unit tangent `dz/dt` at `t` (right-sided at polyline vertices).
    pub fn tangent(&self, t: f64) -> Complex64 {
        let t = if self.closed { self.wrap(t) } else { t.clamp(0.0, self.length) };
        match &self.kind {
            CurveKind::Segment { a, b } => (b - a) / self.length,
            CurveKind::CircleArc { radius, theta0, theta1, .. } => {
                let dir = if theta1 > theta0 { 1.0 } else { -1.0 };
                Complex64::i() * Complex64::from_polar(dir, theta0 + dir * t / radius)
            }
            CurveKind::FullCircle { radius, .. } => Complex64::i() * Complex64::from_polar(1.0, t / radius),
            CurveKind::Polyline { vertices } => {
                let i = self.polyline_segment(t);
                (vertices[i + 1] - vertices[i]) / (self.knots[i + 1] - self.knots[i])
            }
        }
    }

    /// Length of a parameter arc; on closed curves the arc may wrap.
    pub fn arc_length(&self, arc: &Arc) -> Result<f64> {
        let t0 = self.check(arc.t0)?;
        let t1 = self.check(arc.t1)?;
        if self.closed {
            let d = arc.t1 - arc.t0;
            if d > 0.0 && d <= self.length {
                return Ok(d);
            }
            return Ok(rem_euclid(t1 - t0, self.length));
        }
        if t1 < t0 {
            return Err(Error::InvalidArgument("arc on an open curve must have t0 <= t1".into()));
        }
        Ok(t1 - t0)
    }

    /// Parameters where the curve is not smooth (polyline vertices, interior).
    pub fn corners(&self) -> Vec<f64> {
        match &self.kind {
            CurveKind::Polyline { .. } => {
                let n = self.knots.len();
                if self.closed {
                    self.knots[..n - 1].to_vec()
                } else {
                    self.knots[1..n - 1].to_vec()
                }
            }
            _ => Vec::new(),
        }
    }

    /// For a segment, the affine map `t -> a + u t` with `|u| = 1`.
    pub fn line_map(&self) -> Option<(Complex64, Complex64)> {
        match &self.kind {
            CurveKind::Segment { a, b } => Some((*a, (b - a) / self.length)),
            _ => None,
        }
    }

    /// Frame of the adapted polynomial basis for this curve.
    pub fn basis_frame(&self) -> BasisFrame {
        match &self.kind {
            CurveKind::Segment { a, b } => BasisFrame::Chebyshev { center: (a + b) * 0.5, scale: (b - a) * 0.5 },
            CurveKind::CircleArc { center, radius, .. } | CurveKind::FullCircle { center, radius } => {
                BasisFrame::Monomial { center: *center, scale: Complex64::new(*radius, 0.0) }
            }
            CurveKind::Polyline { vertices } => {
                let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for v in vertices {
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

    /// The same point set traversed backwards (`t -> L - t`). Open curves only.
    pub fn reversed(&self) -> Result<Curve> {
        if self.closed {
            return Err(Error::Unsupported("reversing a closed curve breaks its positive orientation".into()));
        }
        let kind = match &self.kind {
            CurveKind::Segment { a, b } => CurveKind::Segment { a: *b, b: *a },
            CurveKind::CircleArc { center, radius, theta0, theta1 } => {
                CurveKind::CircleArc { center: *center, radius: *radius, theta0: *theta1, theta1: *theta0 }
            }
            CurveKind::Polyline { vertices } => {
                let mut v = vertices.clone();
                v.reverse();
                CurveKind::Polyline { vertices: v }
            }
            CurveKind::FullCircle { .. } => unreachable!(),
        };
        Curve::new(kind)
    }

    /// Largest modulus of a point of the curve (sampled at corners and ends).
    pub fn max_modulus(&self) -> f64 {
        match &self.kind {
            CurveKind::Segment { a, b } => a.norm().max(b.norm()),
            CurveKind::Polyline { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            _ => {
                let n = 2048;
                (0..=n).map(|i| self.point(self.length * i as f64 / n as f64).norm()).fold(0.0, f64::max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lengths_of_basic_curves() {
        assert_eq!(Curve::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap().length(), 2.0);
        let circ = Curve::full_circle(c(0.0, 0.0), 1.0).unwrap();
        assert!((circ.length() - 2.0 * PI).abs() < 1e-15);
        assert!(circ.is_closed());
        let poly = Curve::polyline(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert_eq!(poly.length(), 2.0);
        assert!(!poly.is_closed());
    }

    #[test]
    fn points_on_segment_and_circle() {
        let seg = Curve::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(seg.point_at(1.0).unwrap(), c(0.0, 0.0));
        let circ = Curve::full_circle(c(0.0, 0.0), 1.0).unwrap();
        let z = circ.point_at(PI / 2.0).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
        assert!(matches!(seg.point_at(2.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn wrapped_arc_on_circle() {
        let circ = Curve::full_circle(c(0.0, 0.0), 1.0).unwrap();
        let a = circ.arc_length(&Arc::new(3.0 * PI / 2.0, PI / 2.0)).unwrap();
        assert!((a - PI).abs() < 1e-14);
        let full = circ.arc_length(&Arc::new(0.0, 2.0 * PI)).unwrap();
        assert!((full - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_curves() {
        assert_eq!(Curve::segment(c(1.0, 1.0), c(1.0, 1.0)), Err(Error::ZeroLength));
        let bow = Curve::polyline(vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(bow, Err(Error::SelfIntersection { first: 0, second: 2 })));
        let back = Curve::polyline(vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(back, Err(Error::SelfIntersection { .. })));
        assert!(Curve::circle_arc(c(0.0, 0.0), 1.0, 0.0, 7.0).is_err());
    }

    #[test]
    fn closed_polygon_orientation() {
        let ccw = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let sq = Curve::polyline(ccw.clone()).unwrap();
        assert!(sq.is_closed());
        assert_eq!(sq.length(), 4.0);
        let mut cw = ccw;
        cw.reverse();
        assert!(Curve::polyline(cw).is_err());
    }

    #[test]
    fn tangent_is_unit() {
        let arc = Curve::circle_arc(c(1.0, 0.0), 2.0, PI, 0.0).unwrap();
        for i in 0..10 {
            let t = arc.length() * i as f64 / 9.0;
            assert!((arc.tangent(t).norm() - 1.0).abs() < 1e-14);
        }
        let rev = arc.reversed().unwrap();
        assert!((rev.point(0.0) - arc.point(arc.length())).norm() < 1e-14);
    }
}
