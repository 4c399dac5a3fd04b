//! Vectorial measures `(mu_0, ..., mu_k)` on a curve.
//!
//! Each component is an absolutely continuous part, given by weight pieces
//! tiling `[0, L]`, plus finitely many atoms. Positions are arc-length
//! parameters of the curve.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::curve::{Arc, Curve};
use crate::error::{measure_err, Error, Result};
use crate::quad::{self, Loc};

/// A smooth nonnegative profile evaluated at the arc-length parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `sum coeffs[i] t^i`.
    Polynomial { coeffs: Vec<f64> },
    /// Piecewise-linear interpolation of `values` at increasing knots `t`.
    Table { t: Vec<f64>, values: Vec<f64> },
    /// `scale * exp(rate * t)`.
    Exponential { scale: f64, rate: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Profile::Table { t: knots, values } => {
                if t <= knots[0] {
                    return values[0];
                }
                let n = knots.len();
                if t >= knots[n - 1] {
                    return values[n - 1];
                }
                let i = knots.partition_point(|&k| k <= t) - 1;
                let s = (t - knots[i]) / (knots[i + 1] - knots[i]);
                values[i] + s * (values[i + 1] - values[i])
            }
            Profile::Exponential { scale, rate } => scale * libm::exp(rate * t),
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        match self {
            Profile::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(measure_err(path, "polynomial profile needs finite coefficients"));
                }
            }
            Profile::Table { t, values } => {
                if t.len() < 2 || t.len() != values.len() {
                    return Err(measure_err(path, "table profile needs matching knots and values (at least two)"));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(measure_err(path, "table knots must be finite and strictly increasing"));
                }
            }
            Profile::Exponential { scale, rate } => {
                if !scale.is_finite() || !rate.is_finite() {
                    return Err(measure_err(path, "exponential profile needs finite scale and rate"));
                }
            }
        }
        Ok(())
    }

    /// The profile of `t -> self(L - t)`.
    pub fn reflected(&self, length: f64) -> Profile {
        match self {
            Profile::Polynomial { coeffs } => {
                // Expand sum c_i (L - t)^i with binomial coefficients.
                let n = coeffs.len();
                let mut out = alloc::vec![0.0; n];
                for (i, c) in coeffs.iter().enumerate() {
                    let mut binom = 1.0;
                    for m in 0..=i {
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        out[m] += c * binom * sign * libm::pow(length, (i - m) as f64);
                        binom = binom * (i - m) as f64 / (m + 1) as f64;
                    }
                }
                Profile::Polynomial { coeffs: out }
            }
            Profile::Table { t, values } => Profile::Table {
                t: t.iter().rev().map(|x| length - x).collect(),
                values: values.iter().rev().copied().collect(),
            },
            Profile::Exponential { scale, rate } => {
                Profile::Exponential { scale: scale * libm::exp(rate * length), rate: -rate }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Profile {
        match self {
            Profile::Polynomial { coeffs } => Profile::Polynomial { coeffs: coeffs.iter().map(|x| x * c).collect() },
            Profile::Table { t, values } => {
                Profile::Table { t: t.clone(), values: values.iter().map(|x| x * c).collect() }
            }
            Profile::Exponential { scale, rate } => Profile::Exponential { scale: scale * c, rate: *rate },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Nondecreasing,
    Nonincreasing,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Nondecreasing => Direction::Nonincreasing,
            Direction::Nonincreasing => Direction::Nondecreasing,
        }
    }
}

/// Analytic form of a weight on one piece `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightForm {
    Zero,
    /// `c |t - anchor_left|^alpha_left |anchor_right - t|^alpha_right smooth(t)`,
    /// the anchors defaulting to the ends of the piece.
    Power {
        c: f64,
        alpha_left: f64,
        alpha_right: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor_left: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor_right: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smooth: Option<Profile>,
    },
    /// A monotone weight, or one comparable to a monotone function when
    /// `comparable` is set (then the evaluator itself need not be monotone).
    Monotone {
        evaluator: Profile,
        direction: Direction,
        comparable: bool,
    },
    General {
        evaluator: Profile,
    },
    /// Pointwise sum of several non-zero forms on the same piece.
    Sum {
        terms: Vec<WeightForm>,
    },
}

/// A weight piece on the parameter interval `arc` (`t0 < t1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPiece {
    pub arc: Arc,
    pub form: WeightForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub mass: f64,
}

/// One component `mu_j`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureComponent {
    pub pieces: Vec<WeightPiece>,
    pub atoms: Vec<Atom>,
}

/// Which end of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

impl WeightPiece {
    pub fn new(t0: f64, t1: f64, form: WeightForm) -> WeightPiece {
        WeightPiece { arc: Arc::new(t0, t1), form }
    }

    pub fn zero(t0: f64, t1: f64) -> WeightPiece {
        WeightPiece::new(t0, t1, WeightForm::Zero)
    }

    /// Constant weight `c` on `[t0, t1]`.
    pub fn constant(t0: f64, t1: f64, c: f64) -> WeightPiece {
        WeightPiece::power(t0, t1, c, 0.0, 0.0)
    }

    pub fn power(t0: f64, t1: f64, c: f64, alpha_left: f64, alpha_right: f64) -> WeightPiece {
        WeightPiece::new(
            t0,
            t1,
            WeightForm::Power { c, alpha_left, alpha_right, anchor_left: None, anchor_right: None, smooth: None },
        )
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, WeightForm::Zero)
    }

    /// Weight value at `t` (inside the piece).
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_at(Loc { t, dl: t - self.arc.t0, dr: self.arc.t1 - t })
    }

    /// Weight value at a node carrying accurate distances to the piece ends.
    pub fn eval_at(&self, x: Loc) -> f64 {
        eval_form(&self.form, self.arc, x)
    }

    /// Algebraic exponent of a power piece at one of its ends (0 when the
    /// anchor lies beyond that end); the smallest one for a sum of powers.
    /// `None` for other forms.
    pub fn end_exponent(&self, end: End) -> Option<f64> {
        form_end_exponent(&self.form, self.arc, end)
    }

    /// The same form restricted to `[a, b]`, keeping power anchors in place.
    pub fn sub_piece(&self, a: f64, b: f64) -> WeightPiece {
        let mut piece = WeightPiece::new(a, b, anchored(&self.form, self.arc));
        piece.tidy_anchors();
        piece
    }

    fn tidy_anchors(&mut self) {
        tidy_form(&mut self.form, self.arc);
    }

    /// Mass `int_a^b w dt` for `[a, b]` inside the piece.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if b <= a || self.is_zero() {
            return 0.0;
        }
        if let WeightForm::Sum { terms } = &self.form {
            return terms.iter().map(|f| WeightPiece { arc: self.arc, form: f.clone() }.mass_between(a, b)).sum();
        }
        if let WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth: None } = &self.form {
            if anchor_left.is_none() && anchor_right.is_none() && a == self.arc.t0 && b == self.arc.t1 {
                let l = b - a;
                return c * libm::pow(l, alpha_left + alpha_right + 1.0) * beta(alpha_left + 1.0, alpha_right + 1.0);
            }
        }
        let ea = if a == self.arc.t0 { self.end_exponent(End::Left) } else { None };
        let eb = if b == self.arc.t1 { self.end_exponent(End::Right) } else { None };
        let (t0, t1) = (self.arc.t0, self.arc.t1);
        quad::integrate_singular(
            |x: Loc| self.eval_at(Loc { t: x.t, dl: x.dl + (a - t0), dr: x.dr + (t1 - b) }),
            a,
            b,
            ea,
            eb,
            0.0,
            1e-12,
        )
        .value
    }

    pub fn mass(&self) -> f64 {
        self.mass_between(self.arc.t0, self.arc.t1)
    }

    fn reflected(&self, length: f64) -> WeightPiece {
        let arc = Arc::new(length - self.arc.t1, length - self.arc.t0);
        WeightPiece { arc, form: reflect_form(&self.form, length) }
    }

    fn scaled(&self, s: f64) -> WeightPiece {
        WeightPiece { arc: self.arc, form: scale_form(&self.form, s) }
    }
}

fn eval_form(form: &WeightForm, arc: Arc, x: Loc) -> f64 {
    let t = x.t;
    match form {
        WeightForm::Zero => 0.0,
        WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } => {
            let dl = match anchor_left {
                None => x.dl,
                Some(a) => x.dl + (arc.t0 - a),
            };
            let dr = match anchor_right {
                None => x.dr,
                Some(a) => x.dr + (a - arc.t1),
            };
            let mut v = *c;
            if *alpha_left != 0.0 {
                v *= libm::pow(dl.abs(), *alpha_left);
            }
            if *alpha_right != 0.0 {
                v *= libm::pow(dr.abs(), *alpha_right);
            }
            if let Some(s) = smooth {
                v *= s.eval(t);
            }
            v
        }
        WeightForm::Monotone { evaluator, .. } | WeightForm::General { evaluator } => evaluator.eval(t).max(0.0),
        WeightForm::Sum { terms } => terms.iter().map(|f| eval_form(f, arc, x)).sum(),
    }
}

fn form_end_exponent(form: &WeightForm, arc: Arc, end: End) -> Option<f64> {
    match form {
        WeightForm::Power { alpha_left, alpha_right, anchor_left, anchor_right, .. } => Some(match end {
            End::Left => {
                if anchor_left.is_none_or(|a| a == arc.t0) {
                    *alpha_left
                } else {
                    0.0
                }
            }
            End::Right => {
                if anchor_right.is_none_or(|a| a == arc.t1) {
                    *alpha_right
                } else {
                    0.0
                }
            }
        }),
        WeightForm::Sum { terms } => {
            let mut e = f64::INFINITY;
            for f in terms {
                e = e.min(form_end_exponent(f, arc, end)?);
            }
            e.is_finite().then_some(e)
        }
        _ => None,
    }
}

fn anchored(form: &WeightForm, arc: Arc) -> WeightForm {
    match form {
        WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } => WeightForm::Power {
            c: *c,
            alpha_left: *alpha_left,
            alpha_right: *alpha_right,
            anchor_left: Some(anchor_left.unwrap_or(arc.t0)),
            anchor_right: Some(anchor_right.unwrap_or(arc.t1)),
            smooth: smooth.clone(),
        },
        WeightForm::Sum { terms } => WeightForm::Sum { terms: terms.iter().map(|f| anchored(f, arc)).collect() },
        f => f.clone(),
    }
}

fn tidy_form(form: &mut WeightForm, arc: Arc) {
    match form {
        WeightForm::Power { anchor_left, anchor_right, .. } => {
            if *anchor_left == Some(arc.t0) {
                *anchor_left = None;
            }
            if *anchor_right == Some(arc.t1) {
                *anchor_right = None;
            }
        }
        WeightForm::Sum { terms } => terms.iter_mut().for_each(|f| tidy_form(f, arc)),
        _ => {}
    }
}

fn reflect_form(form: &WeightForm, length: f64) -> WeightForm {
    match form {
        WeightForm::Zero => WeightForm::Zero,
        WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } => WeightForm::Power {
            c: *c,
            alpha_left: *alpha_right,
            alpha_right: *alpha_left,
            anchor_left: anchor_right.map(|a| length - a),
            anchor_right: anchor_left.map(|a| length - a),
            smooth: smooth.as_ref().map(|s| s.reflected(length)),
        },
        WeightForm::Monotone { evaluator, direction, comparable } => WeightForm::Monotone {
            evaluator: evaluator.reflected(length),
            direction: direction.flipped(),
            comparable: *comparable,
        },
        WeightForm::General { evaluator } => WeightForm::General { evaluator: evaluator.reflected(length) },
        WeightForm::Sum { terms } => WeightForm::Sum { terms: terms.iter().map(|f| reflect_form(f, length)).collect() },
    }
}

fn scale_form(form: &WeightForm, s: f64) -> WeightForm {
    match form {
        WeightForm::Zero => WeightForm::Zero,
        WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } => WeightForm::Power {
            c: c * s,
            alpha_left: *alpha_left,
            alpha_right: *alpha_right,
            anchor_left: *anchor_left,
            anchor_right: *anchor_right,
            smooth: smooth.clone(),
        },
        WeightForm::Monotone { evaluator, direction, comparable } => {
            WeightForm::Monotone { evaluator: evaluator.scaled(s), direction: *direction, comparable: *comparable }
        }
        WeightForm::General { evaluator } => WeightForm::General { evaluator: evaluator.scaled(s) },
        WeightForm::Sum { terms } => WeightForm::Sum { terms: terms.iter().map(|f| scale_form(f, s)).collect() },
    }
}

fn beta(a: f64, b: f64) -> f64 {
    libm::exp(libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b))
}

/// Number of samples used when checking profiles for sign and monotonicity.
const SAMPLES: usize = 257;

fn validate_piece(piece: &WeightPiece, path: &str) -> Result<()> {
    let (t0, t1) = (piece.arc.t0, piece.arc.t1);
    let samples = || (0..SAMPLES).map(move |i| t0 + (t1 - t0) * i as f64 / (SAMPLES - 1) as f64);
    match &piece.form {
        WeightForm::Zero => {}
        WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(measure_err(path, "power weight needs a finite positive constant c"));
            }
            if !alpha_left.is_finite() || !alpha_right.is_finite() {
                return Err(measure_err(path, "power exponents must be finite"));
            }
            if anchor_left.is_some_and(|a| !(a <= t0)) || anchor_right.is_some_and(|a| !(a >= t1)) {
                return Err(measure_err(path, "power anchors must lie outside the open piece"));
            }
            for (end, name) in [(End::Left, "alpha_left"), (End::Right, "alpha_right")] {
                if piece.end_exponent(end).unwrap() <= -1.0 {
                    return Err(Error::InfiniteMass {
                        path: path.into(),
                        reason: format!("{name} <= -1 makes the weight non-integrable"),
                    });
                }
            }
            if let Some(s) = smooth {
                s.validate(path)?;
                if samples().any(|t| !(s.eval(t) > 0.0) || !s.eval(t).is_finite()) {
                    return Err(measure_err(path, "smooth factor of a power weight must be positive on the piece"));
                }
            }
        }
        WeightForm::Monotone { evaluator, direction, comparable } => {
            evaluator.validate(path)?;
            let vals: Vec<f64> = samples().map(|t| evaluator.eval(t)).collect();
            if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(measure_err(path, "monotone evaluator must be finite and nonnegative"));
            }
            if !comparable {
                let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let tol = 1e-12 * scale;
                let bad = vals.windows(2).any(|w| match direction {
                    Direction::Nondecreasing => w[1] < w[0] - tol,
                    Direction::Nonincreasing => w[1] > w[0] + tol,
                });
                if bad {
                    return Err(measure_err(path, "evaluator is not monotone in the declared direction"));
                }
            }
        }
        WeightForm::Sum { terms } => {
            if terms.is_empty() {
                return Err(measure_err(path, "a sum weight needs at least one term"));
            }
            for (i, f) in terms.iter().enumerate() {
                if matches!(f, WeightForm::Zero | WeightForm::Sum { .. }) {
                    return Err(measure_err(path, "sum terms must be non-zero and not sums themselves"));
                }
                validate_piece(&WeightPiece { arc: piece.arc, form: f.clone() }, &format!("{path}.terms[{i}]"))?;
            }
        }
        WeightForm::General { evaluator } => {
            evaluator.validate(path)?;
            if samples().any(|t| {
                let v = evaluator.eval(t);
                !v.is_finite() || v < 0.0
            }) {
                return Err(measure_err(path, "weight evaluator must be finite and nonnegative"));
            }
        }
    }
    Ok(())
}

impl MeasureComponent {
    pub fn new(pieces: Vec<WeightPiece>, atoms: Vec<Atom>) -> Self {
        MeasureComponent { pieces, atoms }
    }

    /// A component that is `c ds` on the whole curve.
    pub fn lebesgue(length: f64, c: f64) -> Self {
        MeasureComponent { pieces: alloc::vec![WeightPiece::constant(0.0, length, c)], atoms: Vec::new() }
    }

    pub fn atoms_only(atoms: Vec<Atom>) -> Self {
        MeasureComponent { pieces: Vec::new(), atoms }
    }

    /// Piece containing `t` (the right-hand one at an interior boundary).
    pub fn piece_at(&self, t: f64) -> Option<&WeightPiece> {
        let i = self.pieces.partition_point(|p| p.arc.t1 <= t);
        self.pieces.get(i).or_else(|| self.pieces.last().filter(|p| p.arc.t1 == t))
    }

    pub fn density(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(0.0, |p| p.eval(t))
    }

    pub fn has_ac_part(&self) -> bool {
        self.pieces.iter().any(|p| !p.is_zero())
    }

    pub fn ac_mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.mass()).sum()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.ac_mass() + self.atom_mass()
    }

    /// Absolutely continuous mass over `[a, b]`.
    pub fn ac_mass_between(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.arc.t1 > a && p.arc.t0 < b)
            .map(|p| p.mass_between(p.arc.t0.max(a), p.arc.t1.min(b)))
            .sum()
    }

    /// `int_a^b f(t) w(t) dt` over the absolutely continuous part.
    pub fn integrate_ac<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut total = 0.0;
        for piece in self.pieces.iter().filter(|p| p.arc.t1 > a && p.arc.t0 < b && !p.is_zero()) {
            let (t0, t1) = (piece.arc.t0, piece.arc.t1);
            let (lo, hi) = (t0.max(a), t1.min(b));
            let ea = if lo == t0 { piece.end_exponent(End::Left) } else { None };
            let eb = if hi == t1 { piece.end_exponent(End::Right) } else { None };
            total += quad::integrate_singular(
                |x: Loc| {
                    let w = piece.eval_at(Loc { t: x.t, dl: x.dl + (lo - t0), dr: x.dr + (t1 - hi) });
                    if w == 0.0 {
                        0.0
                    } else {
                        f(x.t) * w
                    }
                },
                lo,
                hi,
                ea,
                eb,
                0.0,
                1e-12,
            )
            .value;
        }
        total
    }

    /// Boundaries of the pieces, including `0` and `L`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for p in &self.pieces {
            v.push(p.arc.t0);
            v.push(p.arc.t1);
        }
        v
    }
}

/// A validated vectorial measure on a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorialMeasure {
    curve: Curve,
    p: f64,
    components: Vec<MeasureComponent>,
    exact: BTreeMap<u64, BigRational>,
}

/// A union of parameter arcs with optional endpoint inclusion. Used for
/// restrictions and for kernel computations on compact sub-regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub arcs: Vec<RegionArc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionArc {
    pub t0: f64,
    pub t1: f64,
    pub start_closed: bool,
    pub end_closed: bool,
}

impl Region {
    /// Union of compact arcs `[t0, t1]`.
    pub fn compact(arcs: &[(f64, f64)]) -> Region {
        Region {
            arcs: arcs.iter().map(|&(t0, t1)| RegionArc { t0, t1, start_closed: true, end_closed: true }).collect(),
        }
    }

    pub fn contains_point(&self, t: f64) -> bool {
        self.arcs.iter().any(|a| (t > a.t0 && t < a.t1) || (t == a.t0 && a.start_closed) || (t == a.t1 && a.end_closed))
    }

    /// Whether the open interval `(a, b)` lies inside the region.
    pub fn contains_open(&self, a: f64, b: f64) -> bool {
        self.arcs.iter().any(|r| r.t0 <= a && b <= r.t1)
    }

    /// Whether the half-point at `t` on the given side lies in the region.
    pub fn contains_half(&self, t: f64, right: bool) -> bool {
        self.arcs.iter().any(|a| {
            if right {
                (t > a.t0 && t < a.t1) || (t == a.t0 && a.start_closed)
            } else {
                (t > a.t0 && t < a.t1) || (t == a.t1 && a.end_closed)
            }
        })
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.arcs.iter().flat_map(|a| [a.t0, a.t1]).collect()
    }
}

fn exact_from_f64(x: f64) -> BigRational {
    let bits = x.to_bits();
    let sign = if (bits >> 63) != 0 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let m = BigInt::from(mant) * sign;
    if e >= 0 {
        BigRational::from_integer(m << (e as usize))
    } else {
        BigRational::new(m, BigInt::from(1) << ((-e) as usize))
    }
}

impl VectorialMeasure {
    /// Validates and normalises a measure: pieces must tile `[0, L]`, atoms
    /// must lie on the curve with positive mass. Missing trailing components
    /// are not allowed; pass empty components instead.
    pub fn new(curve: Curve, p: f64, components: Vec<MeasureComponent>) -> Result<VectorialMeasure> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must satisfy 1 <= p < inf, got {p}")));
        }
        if components.is_empty() {
            return Err(Error::InvalidArgument("a measure needs at least mu_0".into()));
        }
        let length = curve.length();
        let tol = 1e-12 * length.max(1.0);
        let mut out = Vec::with_capacity(components.len());
        for (j, comp) in components.into_iter().enumerate() {
            let base = format!("components[{j}]");
            let mut pieces = comp.pieces;
            pieces.sort_by(|a, b| a.arc.t0.total_cmp(&b.arc.t0));
            if !pieces.is_empty() {
                let mut cursor = 0.0;
                for (i, piece) in pieces.iter_mut().enumerate() {
                    let path = format!("{base}.pieces[{i}]");
                    if !(piece.arc.t0.is_finite() && piece.arc.t1.is_finite()) || !(piece.arc.t1 > piece.arc.t0) {
                        return Err(measure_err(path, "piece arc must satisfy t0 < t1"));
                    }
                    if (piece.arc.t0 - cursor).abs() > tol {
                        return Err(measure_err(
                            path,
                            format!("pieces must tile [0, {length}] without gaps; expected start {cursor}"),
                        ));
                    }
                    piece.arc.t0 = cursor;
                    validate_piece(piece, &path)?;
                    piece.tidy_anchors();
                    cursor = piece.arc.t1;
                }
                let last = pieces.len() - 1;
                if (pieces[last].arc.t1 - length).abs() > tol {
                    return Err(measure_err(
                        format!("{base}.pieces[{last}]"),
                        format!("pieces must end at the curve length {length}"),
                    ));
                }
                pieces[last].arc.t1 = length;
                // Drop redundant zero pieces when everything is zero.
                if pieces.iter().all(|p| p.is_zero()) {
                    pieces.clear();
                }
            }
            let mut atoms: Vec<Atom> = Vec::with_capacity(comp.atoms.len());
            for (i, a) in comp.atoms.iter().enumerate() {
                let path = format!("{base}.atoms[{i}]");
                if !(a.mass.is_finite() && a.mass > 0.0) {
                    return Err(measure_err(path, "atom mass must be finite and positive"));
                }
                if !a.t.is_finite() || (!curve.is_closed() && (a.t < -tol || a.t > length + tol)) {
                    return Err(measure_err(path, format!("atom position must lie in [0, {length}]")));
                }
                let t = if curve.is_closed() { curve.wrap(a.t) } else { a.t.clamp(0.0, length) };
                atoms.push(Atom { t, mass: a.mass });
            }
            atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
            let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
            for a in atoms {
                match merged.last_mut() {
                    Some(m) if m.t == a.t => m.mass += a.mass,
                    _ => merged.push(a),
                }
            }
            out.push(MeasureComponent { pieces, atoms: merged });
        }
        Ok(VectorialMeasure { curve, p, components: out, exact: BTreeMap::new() })
    }

    /// Records exact rational values for some parameters (used by the
    /// exact kernel solver). Keys are the `f64` values used in the model.
    pub fn with_exact_points(mut self, points: impl IntoIterator<Item = (f64, BigRational)>) -> Self {
        for (x, r) in points {
            self.exact.insert(x.to_bits(), r);
        }
        self
    }

    /// Exact rational value of a parameter: the recorded one, else the
    /// exact binary value of the float.
    pub fn exact_param(&self, t: f64) -> BigRational {
        self.exact.get(&t.to_bits()).cloned().unwrap_or_else(|| exact_from_f64(t))
    }

    pub fn exact_points(&self) -> impl Iterator<Item = (f64, &BigRational)> {
        self.exact.iter().map(|(k, v)| (f64::from_bits(*k), v))
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Order `k` (number of components minus one).
    pub fn k(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[MeasureComponent] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &MeasureComponent {
        &self.components[j]
    }

    /// Total mass of every component.
    pub fn masses(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.total_mass()).collect()
    }

    /// All piece boundaries and atom positions, sorted and deduplicated.
    pub fn candidate_points(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0, self.curve.length()];
        for c in &self.components {
            v.extend(c.breakpoints());
            v.extend(c.atoms.iter().map(|a| a.t));
        }
        sort_dedup(&mut v);
        v
    }

    /// The measure reflected by `t -> L - t` on the reversed curve.
    pub fn reversed(&self) -> Result<VectorialMeasure> {
        let curve = self.curve.reversed()?;
        let l = self.curve.length();
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut pieces: Vec<WeightPiece> = c.pieces.iter().map(|p| p.reflected(l)).collect();
                pieces.reverse();
                let atoms = c.atoms.iter().rev().map(|a| Atom { t: l - a.t, mass: a.mass }).collect();
                MeasureComponent { pieces, atoms }
            })
            .collect();
        let mut m = VectorialMeasure::new(curve, self.p, components)?;
        for (x, r) in self.exact_points() {
            let lr = self.exact_param(l);
            m.exact.insert((l - x).to_bits(), lr - r);
        }
        Ok(m)
    }

    /// Every component multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<VectorialMeasure> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let components = self
            .components
            .iter()
            .map(|comp| MeasureComponent {
                pieces: comp.pieces.iter().map(|p| p.scaled(c)).collect(),
                atoms: comp.atoms.iter().map(|a| Atom { t: a.t, mass: a.mass * c }).collect(),
            })
            .collect();
        let mut m = VectorialMeasure::new(self.curve.clone(), self.p, components)?;
        m.exact = self.exact.clone();
        Ok(m)
    }

    /// Adds an atom to component `j`.
    pub fn with_atom(&self, j: usize, atom: Atom) -> Result<VectorialMeasure> {
        if j > self.k() {
            return Err(Error::InvalidArgument(format!("component {j} does not exist")));
        }
        let mut comps = self.components.clone();
        comps[j].atoms.push(atom);
        let mut m = VectorialMeasure::new(self.curve.clone(), self.p, comps)?;
        m.exact = self.exact.clone();
        Ok(m)
    }

    /// The restriction `mu|_region` of every component.
    pub fn restrict(&self, region: &Region) -> Result<VectorialMeasure> {
        let mut cuts = region.endpoints();
        cuts.retain(|t| *t > 0.0 && *t < self.curve.length());
        sort_dedup(&mut cuts);
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut pieces: Vec<WeightPiece> = Vec::new();
                for piece in &comp.pieces {
                    let mut edges = alloc::vec![piece.arc.t0];
                    edges.extend(cuts.iter().copied().filter(|t| *t > piece.arc.t0 && *t < piece.arc.t1));
                    edges.push(piece.arc.t1);
                    for w in edges.windows(2) {
                        let inside = region.contains_open(w[0], w[1]);
                        let sub = if inside && !piece.is_zero() {
                            if w[0] == piece.arc.t0 && w[1] == piece.arc.t1 {
                                piece.clone()
                            } else {
                                piece.sub_piece(w[0], w[1])
                            }
                        } else {
                            WeightPiece::zero(w[0], w[1])
                        };
                        match pieces.last_mut() {
                            Some(last) if last.is_zero() && sub.is_zero() => last.arc.t1 = sub.arc.t1,
                            _ => pieces.push(sub),
                        }
                    }
                }
                let atoms = comp.atoms.iter().copied().filter(|a| region.contains_point(a.t)).collect();
                MeasureComponent { pieces, atoms }
            })
            .collect();
        let mut m = VectorialMeasure::new(self.curve.clone(), self.p, components)?;
        m.exact = self.exact.clone();
        Ok(m)
    }
}

pub(crate) fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
}

/// Sum of several components, viewed as one scalar measure.
#[derive(Debug, Clone, Copy)]
pub struct MeasureSum<'a> {
    pub parts: &'a [&'a MeasureComponent],
}

impl<'a> MeasureSum<'a> {
    pub fn density(&self, t: f64) -> f64 {
        self.parts.iter().map(|c| c.density(t)).sum()
    }
}

/// Human-readable label for diagnostics.
pub fn describe_atom(j: usize, a: &Atom) -> String {
    format!("atom of mu_{j} at t = {}", a.t)
}
