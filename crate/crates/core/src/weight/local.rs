//! Local behaviour of every weight on a common grid of candidate points.
//!
//! Between consecutive candidate points each weight has one analytic form,
//! so membership questions reduce to a finite table: one entry per open
//! cell and one per half-point (the left and right sides of a grid point).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::measure::{sort_dedup, Direction, End, MeasureComponent, VectorialMeasure, WeightForm, WeightPiece};
use crate::quad::{gk15, Loc};

/// Three-valued answer of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    pub fn from_bool(b: bool) -> Decision {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }

    /// Logical or: `Yes` wins, then `Unknown`.
    pub fn or(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::Yes, _) | (_, Decision::Yes) => Decision::Yes,
            (Decision::Unknown, _) | (_, Decision::Unknown) => Decision::Unknown,
            _ => Decision::No,
        }
    }

    /// Logical and: `No` wins, then `Unknown`.
    pub fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::No, _) | (_, Decision::No) => Decision::No,
            (Decision::Unknown, _) | (_, Decision::Unknown) => Decision::Unknown,
            _ => Decision::Yes,
        }
    }
}

/// Behaviour of a weight on one side of a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideInfo {
    /// `w^{-1/(p-1)}` integrable on a one-sided neighbourhood (`p = 1`:
    /// `1/w` essentially bounded there).
    pub bp: Decision,
    /// Some `delta` with `w >= c |t - z|^delta` on that side, when certified.
    pub lower_exponent: Option<f64>,
    /// Algebraic exponent of the weight at the point, when the form has one
    /// (`0` for a weight that is continuous and positive there).
    pub exponent: Option<f64>,
    /// The weight vanishes on that side.
    pub zero: bool,
}

impl SideInfo {
    const ZERO: SideInfo = SideInfo { bp: Decision::No, lower_exponent: None, exponent: None, zero: true };
    const POSITIVE: SideInfo =
        SideInfo { bp: Decision::Yes, lower_exponent: Some(0.0), exponent: Some(0.0), zero: false };
}

/// Sorted candidate points `b_0 = 0 < ... < b_n = L`; cell `i` is `(b_i, b_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<f64>,
    pub closed: bool,
    pub length: f64,
}

impl Grid {
    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    /// Grid index of an exact grid point.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = self.points.partition_point(|&b| b < t);
        (i < self.points.len() && self.points[i] == t).then_some(i)
    }

    /// Cell containing a non-grid parameter.
    pub fn cell_of(&self, t: f64) -> usize {
        let i = self.points.partition_point(|&b| b <= t);
        i.saturating_sub(1).min(self.cells() - 1)
    }

    pub fn mid(&self, cell: usize) -> f64 {
        0.5 * (self.points[cell] + self.points[cell + 1])
    }
}

/// Local data of one weight `w_j` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLocal {
    /// `w_j` locally in `B_p` on the open cell.
    pub cell_bp: Vec<Decision>,
    /// `w_j > 0` on a set of positive length in the cell.
    pub cell_positive: Vec<bool>,
    /// Side information on `(b_i, b_i + eps)`; index `n` unused.
    pub right: Vec<SideInfo>,
    /// Side information on `(b_i - eps, b_i)`; index `0` unused.
    pub left: Vec<SideInfo>,
    /// The piece covering each cell, after normalisation.
    pub cell_piece: Vec<usize>,
    pub pieces: Vec<WeightPiece>,
}

/// Local structure of a whole vectorial measure.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStructure {
    pub grid: Grid,
    pub p: f64,
    pub comps: Vec<ComponentLocal>,
    /// Some decision relied on a numerical test rather than an exponent rule.
    pub numerical: bool,
}

/// Splits monotone pieces at the end of their zero set so that every
/// remaining monotone piece is positive on its interior.
pub fn normalized_pieces(comp: &MeasureComponent, length: f64) -> Vec<WeightPiece> {
    if comp.pieces.is_empty() {
        return alloc::vec![WeightPiece::zero(0.0, length)];
    }
    let mut out = Vec::with_capacity(comp.pieces.len());
    for piece in &comp.pieces {
        match &piece.form {
            WeightForm::Monotone { evaluator, direction, .. } => {
                let (t0, t1) = (piece.arc.t0, piece.arc.t1);
                let low = match direction {
                    Direction::Nondecreasing => t0,
                    Direction::Nonincreasing => t1,
                };
                if evaluator.eval(low) > 0.0 {
                    out.push(piece.clone());
                    continue;
                }
                // Find the extent of the zero set from the low end by bisection.
                let high = if low == t0 { t1 } else { t0 };
                if evaluator.eval(high) <= 0.0 && evaluator.eval(0.5 * (t0 + t1)) <= 0.0 {
                    out.push(WeightPiece::zero(t0, t1));
                    continue;
                }
                let (mut zero_side, mut pos_side) = (low, high);
                for _ in 0..80 {
                    let m = 0.5 * (zero_side + pos_side);
                    if m == zero_side || m == pos_side {
                        break;
                    }
                    if evaluator.eval(m) > 0.0 {
                        pos_side = m;
                    } else {
                        zero_side = m;
                    }
                }
                let cut = zero_side;
                if cut == low {
                    out.push(piece.clone());
                } else if low == t0 {
                    out.push(WeightPiece::zero(t0, cut));
                    out.push(WeightPiece::new(cut, t1, piece.form.clone()));
                } else {
                    out.push(WeightPiece::new(t0, cut, piece.form.clone()));
                    out.push(WeightPiece::zero(cut, t1));
                }
            }
            _ => out.push(piece.clone()),
        }
    }
    out
}

fn q_of(p: f64) -> f64 {
    1.0 / (p - 1.0)
}

/// Exponent rule: `|t - z|^e` has integrable `-1/(p-1)` power near `z`.
pub fn exponent_is_bp(e: f64, p: f64) -> bool {
    if p == 1.0 {
        e <= 0.0
    } else {
        e * q_of(p) < 1.0
    }
}

/// Numerical integrability test of `w^{-q}` on a one-sided neighbourhood of
/// a point where the continuous profile vanishes. Compares the integrals over
/// dyadic shells: their ratios tend to `2^{a q - 1}` for `w ~ s^a`.
fn shell_test<F: Fn(f64) -> f64>(w_at_distance: F, h: f64, p: f64) -> Decision {
    if p == 1.0 {
        // A continuous weight tending to zero has unbounded reciprocal.
        return Decision::No;
    }
    let q = q_of(p);
    let scale = (0..=16).map(|i| w_at_distance(h * i as f64 / 16.0)).fold(0.0f64, f64::max);
    if scale <= 0.0 {
        return Decision::No;
    }
    let mut shells: Vec<f64> = Vec::new();
    for m in 0..40 {
        let hi = h * libm::ldexp(1.0, -m);
        let lo = 0.5 * hi;
        if w_at_distance(lo) < 1e-11 * scale {
            break;
        }
        let (v, _) = gk15(&mut |s: f64| libm::pow(w_at_distance(s), -q), lo, hi);
        if !v.is_finite() {
            return Decision::No;
        }
        shells.push(v);
    }
    if shells.len() < 8 {
        return Decision::Unknown;
    }
    let ratios: Vec<f64> = shells.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len() - 5..];
    let hi = tail.iter().copied().fold(f64::MIN, f64::max);
    let lo = tail.iter().copied().fold(f64::MAX, f64::min);
    if hi < 0.97 {
        Decision::Yes
    } else if lo >= 0.995 {
        Decision::No
    } else {
        Decision::Unknown
    }
}

/// Side information of a sum of weights: it is `B_p` as soon as one term
/// is, bounded below by every term, and vanishes to the least order.
fn combine(infos: impl Iterator<Item = SideInfo>) -> SideInfo {
    let mut out = SideInfo { bp: Decision::No, lower_exponent: None, exponent: Some(f64::INFINITY), zero: true };
    for s in infos {
        out.bp = out.bp.or(s.bp);
        out.lower_exponent = match (out.lower_exponent, s.lower_exponent) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if !s.zero {
            out.exponent = match (out.exponent, s.exponent) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
        }
        out.zero &= s.zero;
    }
    if out.zero {
        return SideInfo::ZERO;
    }
    out
}

/// Side information of a piece at one of its ends.
fn end_info(piece: &WeightPiece, end: End, p: f64, numerical: &mut bool) -> SideInfo {
    let (t0, t1) = (piece.arc.t0, piece.arc.t1);
    let h = 0.5 * (t1 - t0);
    let at_dist = |s: f64| match end {
        End::Left => piece.eval_at(Loc { t: t0 + s, dl: s, dr: (t1 - t0) - s }),
        End::Right => piece.eval_at(Loc { t: t1 - s, dl: (t1 - t0) - s, dr: s }),
    };
    match &piece.form {
        WeightForm::Zero => SideInfo::ZERO,
        WeightForm::Sum { terms } => {
            combine(terms.iter().map(|f| end_info(&WeightPiece { arc: piece.arc, form: f.clone() }, end, p, numerical)))
        }
        WeightForm::Power { .. } => {
            let e = piece.end_exponent(end).unwrap();
            SideInfo {
                bp: Decision::from_bool(exponent_is_bp(e, p)),
                lower_exponent: Some(e),
                exponent: Some(e),
                zero: false,
            }
        }
        WeightForm::Monotone { evaluator, direction, .. } => {
            let high_end = match direction {
                Direction::Nondecreasing => End::Right,
                Direction::Nonincreasing => End::Left,
            };
            let t = if end == End::Left { t0 } else { t1 };
            if end == high_end || evaluator.eval(t) > 0.0 {
                return SideInfo::POSITIVE;
            }
            *numerical = true;
            SideInfo { bp: shell_test(at_dist, h, p), lower_exponent: None, exponent: None, zero: false }
        }
        WeightForm::General { evaluator } => {
            let t = if end == End::Left { t0 } else { t1 };
            if evaluator.eval(t) > 0.0 {
                return SideInfo::POSITIVE;
            }
            *numerical = true;
            SideInfo { bp: shell_test(at_dist, h, p), lower_exponent: None, exponent: None, zero: false }
        }
    }
}

/// Interior verdict of a piece on the open cell `(a, b)`.
fn cell_info(piece: &WeightPiece, a: f64, b: f64, p: f64, numerical: &mut bool) -> (Decision, bool) {
    match &piece.form {
        WeightForm::Zero => (Decision::No, false),
        WeightForm::Power { .. } | WeightForm::Monotone { .. } => (Decision::Yes, true),
        WeightForm::Sum { terms } => terms.iter().fold((Decision::No, false), |(d, pos), f| {
            let (d2, pos2) = cell_info(&WeightPiece { arc: piece.arc, form: f.clone() }, a, b, p, numerical);
            (d.or(d2), pos || pos2)
        }),
        WeightForm::General { evaluator } => {
            *numerical = true;
            let n = 65;
            let vals: Vec<f64> = (1..n).map(|i| evaluator.eval(a + (b - a) * i as f64 / n as f64)).collect();
            let positive = vals.iter().filter(|v| **v > 0.0).count();
            if positive == 0 {
                return (Decision::No, false);
            }
            if positive < vals.len() {
                return (Decision::Unknown, true);
            }
            let inset = 0.125 * (b - a);
            let r = crate::quad::adaptive(
                |t: f64| {
                    let w = evaluator.eval(t);
                    if p == 1.0 {
                        1.0 / w
                    } else {
                        libm::pow(w, -q_of(p))
                    }
                },
                a + inset,
                b - inset,
                0.0,
                1e-8,
                200,
            );
            let ok = r.converged && r.value.is_finite() && r.value < 1e12 * (b - a);
            (if ok { Decision::Yes } else { Decision::Unknown }, true)
        }
    }
}

/// Side information at a point strictly inside a piece.
fn interior_point_info(piece: &WeightPiece, t: f64, right: bool, p: f64, numerical: &mut bool) -> SideInfo {
    match &piece.form {
        WeightForm::Zero => SideInfo::ZERO,
        WeightForm::Power { .. } | WeightForm::Monotone { .. } => SideInfo::POSITIVE,
        WeightForm::Sum { terms } => combine(
            terms
                .iter()
                .map(|f| interior_point_info(&WeightPiece { arc: piece.arc, form: f.clone() }, t, right, p, numerical)),
        ),
        WeightForm::General { evaluator } => {
            if evaluator.eval(t) > 0.0 {
                return SideInfo::POSITIVE;
            }
            *numerical = true;
            let (t0, t1) = (piece.arc.t0, piece.arc.t1);
            let h = if right { 0.5 * (t1 - t) } else { 0.5 * (t - t0) };
            let d = if right {
                shell_test(|s| evaluator.eval(t + s).max(0.0), h, p)
            } else {
                shell_test(|s| evaluator.eval(t - s).max(0.0), h, p)
            };
            SideInfo { bp: d, lower_exponent: None, exponent: None, zero: false }
        }
    }
}

impl ComponentLocal {
    fn build(pieces: Vec<WeightPiece>, grid: &Grid, p: f64, numerical: &mut bool) -> ComponentLocal {
        let n = grid.cells();
        let mut cell_bp = Vec::with_capacity(n);
        let mut cell_positive = Vec::with_capacity(n);
        let mut cell_piece = Vec::with_capacity(n);
        let mut k = 0;
        for i in 0..n {
            let (a, b) = (grid.points[i], grid.points[i + 1]);
            while pieces[k].arc.t1 <= a {
                k += 1;
            }
            cell_piece.push(k);
            let (d, pos) = cell_info(&pieces[k], a, b, p, numerical);
            cell_bp.push(d);
            cell_positive.push(pos);
        }
        let mut right = alloc::vec![SideInfo::ZERO; n + 1];
        let mut left = alloc::vec![SideInfo::ZERO; n + 1];
        for i in 0..n {
            let piece = &pieces[cell_piece[i]];
            let (a, b) = (grid.points[i], grid.points[i + 1]);
            right[i] = if a == piece.arc.t0 {
                end_info(piece, End::Left, p, numerical)
            } else {
                interior_point_info(piece, a, true, p, numerical)
            };
            left[i + 1] = if b == piece.arc.t1 {
                end_info(piece, End::Right, p, numerical)
            } else {
                interior_point_info(piece, b, false, p, numerical)
            };
            // A side cannot be better than the cell it opens onto.
            if cell_bp[i] != Decision::Yes {
                right[i].bp = right[i].bp.and(cell_bp[i]);
                left[i + 1].bp = left[i + 1].bp.and(cell_bp[i]);
            }
        }
        if grid.closed {
            left[0] = left[n];
            right[n] = right[0];
        }
        ComponentLocal { cell_bp, cell_positive, right, left, cell_piece, pieces }
    }
}

impl LocalStructure {
    /// Builds the local table for `mu`, adding `extra` points to the grid.
    pub fn new(mu: &VectorialMeasure, extra: &[f64]) -> LocalStructure {
        let length = mu.curve().length();
        let normalized: Vec<Vec<WeightPiece>> = mu.components().iter().map(|c| normalized_pieces(c, length)).collect();
        let mut pts = mu.candidate_points();
        for pieces in &normalized {
            for piece in pieces {
                pts.push(piece.arc.t0);
                pts.push(piece.arc.t1);
            }
        }
        pts.extend(extra.iter().copied().filter(|t| *t >= 0.0 && *t <= length));
        sort_dedup(&mut pts);
        let grid = Grid { points: pts, closed: mu.curve().is_closed(), length };
        let mut numerical = false;
        let comps =
            normalized.into_iter().map(|pieces| ComponentLocal::build(pieces, &grid, mu.p(), &mut numerical)).collect();
        LocalStructure { grid, p: mu.p(), comps, numerical }
    }

    pub fn k(&self) -> usize {
        self.comps.len() - 1
    }
}
