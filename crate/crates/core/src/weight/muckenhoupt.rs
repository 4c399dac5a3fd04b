//! Muckenhoupt-type constants
//!
//! `Lambda^+(mu, nu) = sup_{z0<z<z1} mu((z0, z]) (int_z^{z1} v^{-1/(p-1)} ds)^{p-1}`
//!
//! with `v = d nu / ds` and `0 * inf = 0`; `Lambda^-` is the mirror image
//! `sup mu([z, z1)) (int_{z0}^z v^{-1/(p-1)})^{p-1}`. For `p = 1` the
//! integral factor is replaced by `ess sup 1/v`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::local::{Decision, LocalStructure, SideInfo};
use crate::curve::{Arc, Curve};
use crate::error::{Error, Result};
use crate::measure::{MeasureComponent, VectorialMeasure, WeightPiece};
use crate::quad::{integrate_singular, Loc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaStatus {
    Finite,
    Infinite,
    Unknown,
}

/// Result of a Muckenhoupt computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuckenhouptReport {
    pub side: Side,
    pub status: LambdaStatus,
    /// Best value found (`inf` when divergent).
    pub value: f64,
    /// How divergence or finiteness was established.
    pub certificate: String,
    /// Parameter where the supremum was attained on the finest grid.
    pub witness: Option<f64>,
    /// Supremum over nested dyadic grids of depth `1, 2, ...` (non-decreasing).
    pub refinement_history: Vec<f64>,
    pub depth: usize,
    /// First depth after which two consecutive refinements changed the value
    /// by less than `1e-6` relative.
    pub converged_at: Option<usize>,
    /// `p^{1/p} p'^{1/p'} Lambda^{1/p}`, a bound for the weighted Hardy
    /// inequality constant, when `Lambda` is finite.
    pub hardy_bound: Option<f64>,
}

/// Default refinement depth.
pub const DEFAULT_DEPTH: usize = 12;

/// A feature making `G` infinite on part of the arc, in local coordinates.
#[derive(Debug, Clone, Copy)]
struct Blowup {
    x: f64,
    /// `G(x') = inf` also at `x' = x` (singularity on the right of `x`).
    closed: bool,
    definite: bool,
}

struct Setup<'a> {
    ls: LocalStructure,
    mu: &'a MeasureComponent,
    p: f64,
    t0: f64,
    t1: f64,
    side: Side,
    nu_parts: usize,
}

impl<'a> Setup<'a> {
    fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    fn to_t(&self, x: f64) -> f64 {
        match self.side {
            Side::Plus => self.t0 + x,
            Side::Minus => self.t1 - x,
        }
    }

    fn to_x(&self, t: f64) -> f64 {
        match self.side {
            Side::Plus => t - self.t0,
            Side::Minus => self.t1 - t,
        }
    }

    /// Grid indices of the arc ends.
    fn range(&self) -> (usize, usize) {
        (self.ls.grid.index_of(self.t0).unwrap(), self.ls.grid.index_of(self.t1).unwrap())
    }

    fn nu_indices(&self) -> core::ops::Range<usize> {
        1..1 + self.nu_parts
    }

    /// Combined side information of `nu` at grid point `i`.
    fn nu_side(&self, i: usize, right: bool) -> SideInfo {
        let mut bp = Decision::No;
        let mut exponent: Option<f64> = None;
        let mut all_zero = true;
        let mut has_unknown_form = false;
        for j in self.nu_indices() {
            let c = &self.ls.comps[j];
            let s = if right { c.right[i] } else { c.left[i] };
            if s.zero {
                continue;
            }
            all_zero = false;
            bp = bp.or(s.bp);
            match s.exponent {
                Some(e) => exponent = Some(exponent.map_or(e, |x: f64| x.min(e))),
                None => has_unknown_form = true,
            }
        }
        if all_zero {
            return SideInfo { bp: Decision::No, lower_exponent: None, exponent: None, zero: true };
        }
        let exponent = if has_unknown_form { None } else { exponent };
        SideInfo { bp, lower_exponent: exponent, exponent, zero: false }
    }

    fn nu_cell(&self, cell: usize) -> Decision {
        self.nu_indices().fold(Decision::No, |acc, j| acc.or(self.ls.comps[j].cell_bp[cell]))
    }

    fn nu_cell_zero(&self, cell: usize) -> bool {
        self.nu_indices().all(|j| !self.ls.comps[j].cell_positive[cell])
    }

    fn piece(&self, j: usize, cell: usize) -> &WeightPiece {
        let c = &self.ls.comps[j];
        &c.pieces[c.cell_piece[cell]]
    }

    /// Density of component `j` at a node of the sub-interval `[a, b]` of `cell`.
    fn density(&self, j: usize, cell: usize, a: f64, b: f64, x: Loc) -> f64 {
        let piece = self.piece(j, cell);
        piece.eval_at(Loc { t: x.t, dl: x.dl + (a - piece.arc.t0), dr: x.dr + (piece.arc.t1 - b) })
    }

    fn nu_density(&self, cell: usize, a: f64, b: f64, x: Loc) -> f64 {
        self.nu_indices().map(|j| self.density(j, cell, a, b, x)).sum()
    }
}

/// `int_a^b w` for component 0 (`mu`) over `[a, b]` inside one grid cell.
fn mu_mass(s: &Setup, cell: usize, a: f64, b: f64) -> f64 {
    let c = &s.ls.comps[0];
    if !c.cell_positive[cell] {
        return 0.0;
    }
    let g = &s.ls.grid;
    let ea = if a == g.points[cell] { c.right[cell].exponent } else { Some(0.0) };
    let eb = if b == g.points[cell + 1] { c.left[cell + 1].exponent } else { Some(0.0) };
    integrate_singular(|x: Loc| s.density(0, cell, a, b, x), a, b, ea, eb, 0.0, 1e-11).value
}

/// `int_a^b v^{-q}` (or `ess sup 1/v` for `p = 1`) inside one grid cell.
fn nu_inverse(s: &Setup, cell: usize, a: f64, b: f64) -> (f64, bool) {
    if s.nu_cell_zero(cell) || s.nu_cell(cell) == Decision::No {
        return (f64::INFINITY, true);
    }
    let g = &s.ls.grid;
    let sa = if a == g.points[cell] { Some(s.nu_side(cell, true)) } else { None };
    let sb = if b == g.points[cell + 1] { Some(s.nu_side(cell + 1, false)) } else { None };
    for side in [sa, sb].into_iter().flatten() {
        if side.bp == Decision::No {
            return (f64::INFINITY, true);
        }
    }
    let p = s.p;
    if p == 1.0 {
        // Sample 1/v on Gauss-Kronrod style nodes; ends are excluded since
        // the side test above already vouches for boundedness there.
        let mut sup = 0.0f64;
        let m = 64;
        for i in 1..m {
            let t = a + (b - a) * i as f64 / m as f64;
            let v = s.nu_density(cell, a, b, Loc { t, dl: t - a, dr: b - t });
            sup = sup.max(1.0 / v);
        }
        return (sup, sup.is_finite());
    }
    let q = 1.0 / (p - 1.0);
    let ea = sa.map_or(Some(0.0), |x| x.exponent.map(|e| -q * e));
    let eb = sb.map_or(Some(0.0), |x| x.exponent.map(|e| -q * e));
    let r = integrate_singular(
        |x: Loc| libm::pow(s.nu_density(cell, a, b, x), -q),
        a,
        b,
        ea.filter(|e| *e > -1.0),
        eb.filter(|e| *e > -1.0),
        0.0,
        1e-11,
    );
    (r.value, r.converged || r.value.is_finite())
}

/// Computes `Lambda^side(mu, nu)` on `arc` where `nu` is the sum of the
/// given components (its atoms are ignored).
pub fn muckenhoupt(
    curve: &Curve,
    p: f64,
    mu: &MeasureComponent,
    nu: &[&MeasureComponent],
    arc: Arc,
    side: Side,
    max_depth: usize,
) -> Result<MuckenhouptReport> {
    let (t0, t1) = (arc.t0, arc.t1);
    if !(t0 >= 0.0 && t1 <= curve.length() && t0 < t1) {
        return Err(Error::InvalidArgument("Muckenhoupt arc must satisfy 0 <= t0 < t1 <= L".into()));
    }
    if max_depth == 0 || max_depth > 20 {
        return Err(Error::InvalidArgument("refinement depth must be between 1 and 20".into()));
    }
    let mut comps = alloc::vec![mu.clone()];
    comps.extend(nu.iter().map(|c| (*c).clone()));
    if nu.is_empty() {
        comps.push(MeasureComponent::default());
    }
    let nu_parts = comps.len() - 1;
    let vm = VectorialMeasure::new(curve.clone(), p, comps)?;
    let ls = LocalStructure::new(&vm, &[t0, t1]);
    let s = Setup { ls, mu, p, t0, t1, side, nu_parts };
    Ok(compute(&s, max_depth))
}

fn compute(s: &Setup, max_depth: usize) -> MuckenhouptReport {
    let (ia, ib) = s.range();
    let len = s.len();
    let grid = &s.ls.grid;

    // Features that make G infinite, in local coordinates.
    let mut blowups: Vec<Blowup> = Vec::new();
    for cell in ia..ib {
        let d = if s.nu_cell_zero(cell) { Decision::No } else { s.nu_cell(cell) };
        if d != Decision::Yes {
            let (xa, xb) = (s.to_x(grid.points[cell]), s.to_x(grid.points[cell + 1]));
            blowups.push(Blowup { x: xa.max(xb), closed: false, definite: d == Decision::No });
        }
    }
    for i in ia..=ib {
        for right in [true, false] {
            if (right && i == ib) || (!right && i == ia) {
                continue;
            }
            let info = s.nu_side(i, right);
            if info.bp == Decision::Yes {
                continue;
            }
            // A singularity on the right of b in t is on the right of x_b for
            // the plus side and on the left for the minus side.
            let closed = right == (s.side == Side::Plus);
            blowups.push(Blowup { x: s.to_x(grid.points[i]), closed, definite: info.bp == Decision::No });
        }
    }
    let frontier = |definite_only: bool| -> Option<(f64, bool)> {
        let mut best: Option<(f64, bool)> = None;
        for b in blowups.iter().filter(|b| b.definite || !definite_only) {
            best = match best {
                None => Some((b.x, b.closed)),
                Some((x, _)) if b.x > x => Some((b.x, b.closed)),
                Some((x, c)) if b.x == x => Some((x, c || b.closed)),
                other => other,
            };
        }
        best
    };

    // F on (0, x] in local coordinates.
    let mu_comp = &s.ls.comps[0];
    let atoms: Vec<(f64, f64)> =
        s.mu.atoms.iter().map(|a| (s.to_x(a.t), a.mass)).filter(|(x, _)| *x > 0.0 && *x <= len).collect();
    let mu_before = |x: f64, inclusive: bool| -> f64 {
        // mu((0, x]) or mu((0, x)).
        let t_lo = s.to_t(0.0).min(s.to_t(x));
        let t_hi = s.to_t(0.0).max(s.to_t(x));
        let ac = s.mu.ac_mass_between(t_lo, t_hi);
        let at: f64 = atoms.iter().filter(|(ax, _)| if inclusive { *ax <= x } else { *ax < x }).map(|a| a.1).sum();
        ac + at
    };

    let finish = |status: LambdaStatus, value: f64, cert: String, witness: Option<f64>, hist: Vec<f64>| {
        let depth = hist.len();
        let converged_at = (2..depth)
            .find(|&d| {
                let (a, b, c) = (hist[d - 2], hist[d - 1], hist[d]);
                (c - b).abs() <= 1e-6 * c.abs() && (b - a).abs() <= 1e-6 * b.abs()
            })
            .map(|d| d + 1);
        let hardy = (status == LambdaStatus::Finite).then(|| hardy_bound(value, s.p));
        MuckenhouptReport {
            side: s.side,
            status,
            value,
            certificate: cert,
            witness,
            refinement_history: hist,
            depth,
            converged_at,
            hardy_bound: hardy,
        }
    };

    let definite = frontier(true);
    if let Some((x, closed)) = definite {
        let inf_mass = if closed { mu_before(x, true) } else { mu_before(x, false) };
        if inf_mass > 0.0 {
            return finish(
                LambdaStatus::Infinite,
                f64::INFINITY,
                format!(
                    "the inverse weight is not integrable beyond t = {} while mu has mass {} before it",
                    s.to_t(x),
                    inf_mass
                ),
                Some(s.to_t(x)),
                Vec::new(),
            );
        }
    }
    let mut undecided = false;
    if let Some((x, closed)) = frontier(false) {
        if definite.is_none_or(|(dx, _)| x > dx) {
            let m = if closed { mu_before(x, true) } else { mu_before(x, false) };
            undecided = m > 0.0;
        }
    }

    // Asymptotics at a closed blow-up point: F ~ x^{a+1}, G^{p-1} ~ x^{p-1-b}.
    let (s_star, s_closed) = definite.unwrap_or((0.0, true));
    let mut cert = String::from("numerical supremum over nested dyadic grids");
    let mut asymptotic_known = false;
    if s_closed && definite.is_some() {
        let t_star = s.to_t(s_star);
        let i = grid.index_of(t_star).unwrap();
        let toward_right = s.side == Side::Plus;
        let nu_info = s.nu_side(i, toward_right);
        let mu_info = if toward_right { mu_comp.right[i] } else { mu_comp.left[i] };
        let next_atom = atoms.iter().filter(|(ax, _)| *ax > s_star).map(|a| a.0).fold(f64::INFINITY, f64::min);
        if mu_info.zero && next_atom > s_star {
            asymptotic_known = true;
            cert = String::from("mu vanishes next to the blow-up of the inverse weight; numerical supremum elsewhere");
        } else if let (Some(a), Some(b)) = (mu_info.exponent, nu_info.exponent) {
            let e = a + s.p - b;
            if e < 0.0 {
                return finish(
                    LambdaStatus::Infinite,
                    f64::INFINITY,
                    format!(
                        "near t = {t_star}: mu ~ |t - z|^{a}, nu ~ |t - z|^{b}; the product behaves like |t - z|^({e}) -> inf"
                    ),
                    Some(t_star),
                    Vec::new(),
                );
            }
            asymptotic_known = true;
            cert = format!("near t = {t_star} the product behaves like |t - z|^({e}); numerical supremum elsewhere");
        }
    }

    // Nodes: dyadic points, atoms, grid points and the blow-up point.
    let levels = max_depth;
    let fine = 1usize << levels;
    let mut nodes: Vec<(f64, usize)> = (0..=fine)
        .map(|i| {
            let lvl = if i == 0 || i == fine { 0 } else { levels - (i.trailing_zeros() as usize) };
            (len * i as f64 / fine as f64, lvl)
        })
        .collect();
    for (ax, _) in &atoms {
        nodes.push((*ax, 1));
    }
    for i in ia..=ib {
        nodes.push((s.to_x(grid.points[i]), 1));
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    nodes.dedup_by(|b, a| a.0 == b.0);
    let xs: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let mut ts: Vec<f64> = xs.iter().map(|x| s.to_t(*x)).collect();
    // Exact grid points keep their exact parameter values.
    for (k, x) in xs.iter().enumerate() {
        for i in ia..=ib {
            if s.to_x(grid.points[i]) == *x {
                ts[k] = grid.points[i];
            }
        }
    }
    let m = xs.len();
    let mut cell_mu = alloc::vec![0.0; m - 1];
    let mut cell_nu = alloc::vec![0.0; m - 1];
    let mut shaky = false;
    for k in 0..m - 1 {
        let (ta, tb) = if ts[k] < ts[k + 1] { (ts[k], ts[k + 1]) } else { (ts[k + 1], ts[k]) };
        if tb <= ta {
            continue;
        }
        // Split at grid points (already nodes, so [ta, tb] sits in one cell).
        let cell = grid.cell_of(0.5 * (ta + tb));
        cell_mu[k] = mu_mass(s, cell, ta, tb);
        let (v, ok) = nu_inverse(s, cell, ta, tb);
        cell_nu[k] = v;
        shaky |= !ok;
    }
    let mut f = alloc::vec![0.0; m];
    let mut atom_idx = 0;
    let mut sorted_atoms = atoms.clone();
    sorted_atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    for k in 0..m {
        if k > 0 {
            acc += cell_mu[k - 1];
        }
        while atom_idx < sorted_atoms.len() && sorted_atoms[atom_idx].0 <= xs[k] {
            acc += sorted_atoms[atom_idx].1;
            atom_idx += 1;
        }
        f[k] = acc;
    }
    let mut g = alloc::vec![0.0; m];
    let mut acc: f64 = 0.0;
    for k in (0..m - 1).rev() {
        acc = if s.p == 1.0 { acc.max(cell_nu[k]) } else { acc + cell_nu[k] };
        g[k] = acc;
    }
    let in_region = |k: usize| -> bool {
        let x = xs[k];
        if x <= 0.0 || x >= len {
            return false;
        }
        match definite {
            Some((sx, true)) => x > sx,
            Some((sx, false)) => x >= sx,
            None => true,
        }
    };
    let value_at = |k: usize| -> f64 {
        if f[k] == 0.0 {
            return 0.0;
        }
        if s.p == 1.0 {
            f[k] * g[k]
        } else {
            f[k] * libm::pow(g[k], s.p - 1.0)
        }
    };
    let mut history = Vec::with_capacity(levels);
    let mut best = 0.0f64;
    let mut witness = None;
    let mut best_level_witness = Vec::with_capacity(levels);
    for lvl in 1..=levels {
        for k in 0..m {
            if (nodes[k].1 == lvl || (lvl == 1 && nodes[k].1 <= 1)) && in_region(k) {
                let v = value_at(k);
                if v > best || (v == best && witness.is_none() && v > 0.0) {
                    best = v;
                    witness = Some(ts[k]);
                }
            }
        }
        history.push(best);
        best_level_witness.push(witness);
    }
    let value = history[levels - 1];
    let witness = best_level_witness[levels - 1];

    if !value.is_finite() {
        return finish(LambdaStatus::Infinite, f64::INFINITY, String::from("infinite grid value"), witness, history);
    }
    // Numerical divergence: tenfold growth over the last four levels.
    if !asymptotic_known && levels >= 5 {
        let last = history[levels - 1];
        let earlier = history[levels - 5];
        if earlier > 0.0 && last >= 10.0 * earlier {
            return finish(
                LambdaStatus::Infinite,
                f64::INFINITY,
                format!("grid values grew from {earlier} to {last} over the last four refinements"),
                witness,
                history,
            );
        }
    }
    if undecided || shaky {
        return finish(
            LambdaStatus::Unknown,
            value,
            String::from(
                "the inverse weight could not be certified integrable where mu has mass; value is a lower bound",
            ),
            witness,
            history,
        );
    }
    finish(LambdaStatus::Finite, value, cert, witness, history)
}

/// `p^{1/p} p'^{1/p'} Lambda^{1/p}` (and `Lambda` itself for `p = 1`).
pub fn hardy_bound(lambda: f64, p: f64) -> f64 {
    if p == 1.0 {
        return lambda;
    }
    let pp = p / (p - 1.0);
    libm::pow(p, 1.0 / p) * libm::pow(pp, 1.0 / pp) * libm::pow(lambda, 1.0 / p)
}

/// Convenience wrapper for components of a vectorial measure:
/// `Lambda^side(mu_i, mu_j)` on `arc`.
pub fn muckenhoupt_components(
    mu: &VectorialMeasure,
    i: usize,
    j: usize,
    arc: Arc,
    side: Side,
    max_depth: usize,
) -> Result<MuckenhouptReport> {
    if i > mu.k() || j > mu.k() {
        return Err(Error::InvalidArgument("component index out of range".into()));
    }
    muckenhoupt(mu.curve(), mu.p(), mu.component(i), &[mu.component(j)], arc, side, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Profile, WeightForm};
    use alloc::vec;
    use num_complex::Complex64;

    fn unit() -> Curve {
        Curve::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
    }

    fn leb() -> MeasureComponent {
        MeasureComponent::lebesgue(1.0, 1.0)
    }

    fn quadratic_nu() -> MeasureComponent {
        // z (1 - z) on [0, 1].
        MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 1.0, 1.0)], vec![])
    }

    #[test]
    fn lebesgue_against_lebesgue_is_a_quarter() {
        let r = muckenhoupt(&unit(), 2.0, &leb(), &[&leb()], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Finite);
        assert!((r.value - 0.25).abs() < 1e-12, "{}", r.value);
        assert!((r.witness.unwrap() - 0.5).abs() < 1e-12);
        let bound = r.hardy_bound.unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
        assert!(2.0 / core::f64::consts::PI <= bound);
    }

    #[test]
    fn lebesgue_against_quadratic_diverges_logarithmically() {
        // G(z) = int_z^1 ds / (s(1-s)) is infinite for every z: the inverse
        // weight is not integrable at 1.
        let r = muckenhoupt(&unit(), 2.0, &leb(), &[&quadratic_nu()], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Infinite);
    }

    #[test]
    fn cube_weight_diverges_symbolically() {
        let nu = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let r = muckenhoupt(&unit(), 2.0, &leb(), &[&nu], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Infinite);
        assert!(r.certificate.contains("|t - z|^(-1)"), "{}", r.certificate);
    }

    #[test]
    fn endpoint_atom_is_excluded() {
        let delta = MeasureComponent::atoms_only(vec![Atom { t: 0.0, mass: 1.0 }]);
        let nu = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let r = muckenhoupt(&unit(), 2.0, &delta, &[&nu], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Finite);
        assert_eq!(r.value, 0.0);
        // z stays inside the open arc, so the minus side ignores it as well.
        let r = muckenhoupt(&unit(), 2.0, &delta, &[&nu], Arc::new(0.0, 1.0), Side::Minus, 12).unwrap();
        assert_eq!(r.value, 0.0);
        // An interior atom on the minus side sees the non-integrable end at 0.
        let inner = MeasureComponent::atoms_only(vec![Atom { t: 0.5, mass: 1.0 }]);
        let r = muckenhoupt(&unit(), 2.0, &inner, &[&nu], Arc::new(0.0, 1.0), Side::Minus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Infinite);
        let r = muckenhoupt(&unit(), 2.0, &inner, &[&nu], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        // mu((0, z]) (int_z^1 s^{-3})  = (z^{-2} - 1)/2 at z = 1/2.
        assert!((r.value - 1.5).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn power_pair_matches_closed_form() {
        // mu = nu = x^3, p = 2: Lambda^+ = max (z^4/4)(z^{-2} - 1)/2 = 1/32.
        let w = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let r = muckenhoupt(&unit(), 2.0, &w, &[&w], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        assert_eq!(r.status, LambdaStatus::Finite);
        assert!((r.value - 1.0 / 32.0).abs() < 1e-4 / 32.0, "{}", r.value);
        for w in r.refinement_history.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn monotone_numeric_weights() {
        let nu = MeasureComponent::new(
            vec![WeightPiece::new(
                0.0,
                1.0,
                WeightForm::Monotone {
                    evaluator: Profile::Exponential { scale: 1.0, rate: 1.0 },
                    direction: crate::measure::Direction::Nondecreasing,
                    comparable: false,
                },
            )],
            vec![],
        );
        let r = muckenhoupt(&unit(), 2.0, &leb(), &[&nu], Arc::new(0.0, 1.0), Side::Plus, 12).unwrap();
        // sup z (e^{-z} - e^{-1}); attained where e^{-z}(1 - z) = e^{-1}.
        let mut best = 0.0f64;
        for i in 1..100000 {
            let z = i as f64 / 100000.0;
            best = best.max(z * (libm::exp(-z) - libm::exp(-1.0)));
        }
        assert_eq!(r.status, LambdaStatus::Finite);
        assert!((r.value - best).abs() < 1e-6, "{} vs {}", r.value, best);
    }
}
