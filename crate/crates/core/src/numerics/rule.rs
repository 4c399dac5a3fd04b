//! Quadrature on curves: adaptive integration against a weight and the
//! fixed node sets used to build Sobolev inner products.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{Arc, Curve, CurveKind};
use crate::error::{Error, Result};
use crate::measure::{End, MeasureComponent, Profile, VectorialMeasure, WeightForm, WeightPiece};
use crate::quad::{self, gauss_jacobi, gauss_legendre, Loc};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    /// The requested tolerance was reached.
    pub converged: bool,
}

/// `int_arc f(z(s)) w(s) ds` over the absolutely continuous part of `comp`.
///
/// Pieces are integrated separately; at a piece end where the weight has an
/// algebraic exponent the substitution `s = u^(1/(1+alpha))` removes it.
pub fn integrate_weighted<F: FnMut(Complex64) -> Complex64>(
    curve: &Curve,
    arc: Arc,
    comp: &MeasureComponent,
    mut f: F,
    tol: f64,
) -> Result<QuadratureResult> {
    let l = curve.length();
    let spans: Vec<(f64, f64)> = if curve.is_closed() && arc.t1 <= arc.t0 {
        if arc.t1 == arc.t0 {
            alloc::vec![(0.0, l)]
        } else {
            alloc::vec![(arc.t0, l), (0.0, arc.t1)]
        }
    } else if arc.t1 < arc.t0 {
        return Err(Error::InvalidArgument("arc on an open curve must have t0 <= t1".into()));
    } else {
        alloc::vec![(arc.t0, arc.t1)]
    };
    let corners = curve.corners();
    let mut out =
        QuadratureResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, subdivisions: 0, converged: true };
    for (a, b) in spans {
        for piece in comp.pieces.iter().filter(|p| !p.is_zero() && p.arc.t1 > a && p.arc.t0 < b) {
            let (t0, t1) = (piece.arc.t0, piece.arc.t1);
            let (lo, hi) = (t0.max(a), t1.min(b));
            let mut cuts = alloc::vec![lo];
            cuts.extend(corners.iter().copied().filter(|c| *c > lo && *c < hi));
            cuts.push(hi);
            for (i, w) in cuts.windows(2).enumerate() {
                let (u, v) = (w[0], w[1]);
                let ea = if i == 0 && u == t0 { piece.end_exponent(End::Left) } else { None };
                let eb = if v == hi && v == t1 { piece.end_exponent(End::Right) } else { None };
                let r = quad::integrate_singular(
                    |x: Loc| {
                        let wt = piece.eval_at(Loc { t: x.t, dl: x.dl + (u - t0), dr: x.dr + (t1 - v) });
                        if wt == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            f(curve.point(x.t)) * wt
                        }
                    },
                    u,
                    v,
                    ea,
                    eb,
                    0.0,
                    tol,
                );
                out.value += r.value;
                out.error_estimate += r.error;
                out.subdivisions += r.intervals;
                out.converged &= r.converged;
            }
        }
    }
    Ok(out)
}

/// A quadrature node of one component: `f^(j)` is sampled at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub z: Complex64,
    pub weight: f64,
}

/// Node sets, one per component, integrating `|P^(j)|^2 w_j` exactly or to
/// rounding for polynomials `P` up to the requested degree. Atoms are nodes
/// carrying their mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevRule {
    pub components: Vec<Vec<Node>>,
}

impl SobolevRule {
    /// Rule for products of polynomials of degree `<= degree` each; `extra`
    /// adds nodes per panel (used for independent re-verification).
    pub fn new(mu: &VectorialMeasure, degree: usize, extra: usize) -> SobolevRule {
        let n = degree + 24 + extra;
        let mut cache = RuleCache::default();
        let curve = mu.curve();
        let components = mu
            .components()
            .iter()
            .map(|comp| {
                let mut nodes = Vec::new();
                for piece in comp.pieces.iter().filter(|p| !p.is_zero()) {
                    piece_nodes(curve, piece, n, &mut cache, &mut nodes);
                }
                nodes.extend(comp.atoms.iter().filter(|a| a.mass > 0.0).map(|a| Node {
                    t: a.t,
                    z: curve.point(a.t),
                    weight: a.mass,
                }));
                nodes
            })
            .collect();
        SobolevRule { components }
    }

    pub fn len(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Default)]
struct RuleCache {
    rules: Vec<((usize, u64, u64), (Vec<f64>, Vec<f64>))>,
}

impl RuleCache {
    fn get(&mut self, n: usize, alpha: f64, beta: f64) -> &(Vec<f64>, Vec<f64>) {
        let key = (n, alpha.to_bits(), beta.to_bits());
        if let Some(i) = self.rules.iter().position(|(k, _)| *k == key) {
            return &self.rules[i].1;
        }
        let r = if alpha == 0.0 && beta == 0.0 { gauss_legendre(n) } else { gauss_jacobi(n, alpha, beta) };
        self.rules.push((key, r));
        &self.rules.last().unwrap().1
    }
}

/// Longest panel on curves whose points are not affine in `t`.
fn max_panel(curve: &Curve) -> f64 {
    match curve.kind() {
        CurveKind::CircleArc { radius, .. } | CurveKind::FullCircle { radius, .. } => {
            radius * core::f64::consts::FRAC_PI_8
        }
        _ => f64::INFINITY,
    }
}

/// How the weight behaves at a piece end.
enum EndKind {
    Smooth,
    /// `w = |t - end|^alpha` times a smooth factor.
    Jacobi(f64),
    /// A sum of powers with smallest exponent `alpha`.
    Graded(f64),
}

fn end_kind(piece: &WeightPiece, end: End) -> EndKind {
    match (&piece.form, piece.end_exponent(end)) {
        (WeightForm::Power { .. }, Some(e)) if e != 0.0 => EndKind::Jacobi(e),
        (WeightForm::Sum { .. }, Some(e)) => EndKind::Graded(e),
        (WeightForm::Sum { terms }, None) if terms.iter().any(|t| matches!(t, WeightForm::Power { .. })) => {
            EndKind::Graded(0.0)
        }
        _ => EndKind::Smooth,
    }
}

fn profile_knots(form: &WeightForm, out: &mut Vec<f64>) {
    match form {
        WeightForm::Power { smooth: Some(Profile::Table { t, .. }), .. }
        | WeightForm::Monotone { evaluator: Profile::Table { t, .. }, .. }
        | WeightForm::General { evaluator: Profile::Table { t, .. } } => out.extend(t.iter().copied()),
        WeightForm::Sum { terms } => terms.iter().for_each(|f| profile_knots(f, out)),
        _ => {}
    }
}

fn piece_nodes(curve: &Curve, piece: &WeightPiece, n: usize, cache: &mut RuleCache, out: &mut Vec<Node>) {
    let (t0, t1) = (piece.arc.t0, piece.arc.t1);
    let mid = 0.5 * (t0 + t1);
    let mut cuts = alloc::vec![t0, mid, t1];
    cuts.extend(curve.corners().into_iter().filter(|c| *c > t0 && *c < t1));
    profile_knots(&piece.form, &mut cuts);
    cuts.retain(|c| *c >= t0 && *c <= t1);
    crate::measure::sort_dedup(&mut cuts);
    let hmax = max_panel(curve);
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let m = libm::ceil((w[1] - w[0]) / hmax).max(1.0) as usize;
        let h = (w[1] - w[0]) / m as f64;
        for i in 0..m {
            let u = w[0] + h * i as f64;
            let v = if i + 1 == m { w[1] } else { u + h };
            panels.push((u, v));
        }
    }
    let last = panels.len() - 1;
    let wt = |t: f64, dl: f64, dr: f64| piece.eval_at(Loc { t, dl, dr });
    for (i, &(u, v)) in panels.iter().enumerate() {
        let left = if i == 0 { end_kind(piece, End::Left) } else { EndKind::Smooth };
        let right = if i == last { end_kind(piece, End::Right) } else { EndKind::Smooth };
        // Offsets from the panel ends to the piece ends.
        let (ol, or) = (u - t0, t1 - v);
        match (left, right) {
            (EndKind::Jacobi(a), _) => {
                let (x, w) = cache.get(n, 0.0, a);
                let h = v - u;
                for (x, w) in x.iter().zip(w) {
                    let dl = 0.5 * h * (1.0 + x);
                    let t = u + dl;
                    let val = wt(t, dl + ol, 0.5 * h * (1.0 - x) + or) / libm::pow(dl, a);
                    push(out, curve, t, w * libm::pow(0.5 * h, 1.0 + a) * val);
                }
            }
            (_, EndKind::Jacobi(b)) => {
                let (x, w) = cache.get(n, b, 0.0);
                let h = v - u;
                for (x, w) in x.iter().zip(w) {
                    let dr = 0.5 * h * (1.0 - x);
                    let t = v - dr;
                    let val = wt(t, 0.5 * h * (1.0 + x) + ol, dr + or) / libm::pow(dr, b);
                    push(out, curve, t, w * libm::pow(0.5 * h, 1.0 + b) * val);
                }
            }
            (EndKind::Graded(a), _) => graded(curve, &wt, u, v, ol, or, a, true, n, cache, out),
            (_, EndKind::Graded(b)) => graded(curve, &wt, u, v, ol, or, b, false, n, cache, out),
            _ => {
                let (x, w) = cache.get(n, 0.0, 0.0);
                let h = v - u;
                for (x, w) in x.iter().zip(w) {
                    let (dl, dr) = (0.5 * h * (1.0 + x), 0.5 * h * (1.0 - x));
                    let t = u + dl;
                    push(out, curve, t, w * 0.5 * h * wt(t, dl + ol, dr + or));
                }
            }
        }
    }
}

fn push(out: &mut Vec<Node>, curve: &Curve, t: f64, weight: f64) {
    if weight != 0.0 {
        out.push(Node { t, z: curve.point(t), weight });
    }
}

/// Geometric refinement toward one end of `[u, v]`, finished by a Jacobi
/// rule for the leading power on the innermost panel.
#[allow(clippy::too_many_arguments)]
fn graded<W: Fn(f64, f64, f64) -> f64>(
    curve: &Curve,
    wt: &W,
    u: f64,
    v: f64,
    ol: f64,
    or: f64,
    alpha: f64,
    at_left: bool,
    n: usize,
    cache: &mut RuleCache,
    out: &mut Vec<Node>,
) {
    const SIGMA: f64 = 0.15;
    const LEVELS: i32 = 20;
    let h = v - u;
    // Distances d from the graded end: panels [h s^(m+1), h s^m].
    let node = |d: f64| if at_left { (u + d, d + ol, h - d + or) } else { (v - d, h - d + ol, d + or) };
    let gl = cache.get(n, 0.0, 0.0).clone();
    for m in 0..LEVELS {
        let (d0, d1) = (h * libm::pow(SIGMA, (m + 1) as f64), h * libm::pow(SIGMA, m as f64));
        let hh = d1 - d0;
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let d = d0 + 0.5 * hh * (1.0 + x);
            let (t, dl, dr) = node(d);
            push(out, curve, t, w * 0.5 * hh * wt(t, dl, dr));
        }
    }
    let d1 = h * libm::pow(SIGMA, LEVELS as f64);
    let (x, w) = cache.get(n, 0.0, alpha).clone();
    for (x, w) in x.iter().zip(&w) {
        let d = 0.5 * d1 * (1.0 + x);
        let (t, dl, dr) = node(d);
        let val = if alpha == 0.0 { wt(t, dl, dr) } else { wt(t, dl, dr) / libm::pow(d, alpha) };
        push(out, curve, t, w * libm::pow(0.5 * d1, 1.0 + alpha) * val);
    }
}
