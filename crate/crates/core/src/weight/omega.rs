//! The sets `Omega_j` where `w_j` is locally `B_p`, and the regular sets
//! `Omega^(j)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::local::{ComponentLocal, Decision, Grid, LocalStructure, SideInfo};
use super::sets::{ArcComponent, CellSet, EndpointStatus, OpenSetOnCurve};
use crate::curve::Arc;
use crate::error::{Error, Result};
use crate::measure::{MeasureComponent, VectorialMeasure};

/// `Omega_j` on the grid of `ls`, and whether some decision was unknown.
pub fn omega_cells(ls: &LocalStructure, j: usize) -> (CellSet, bool) {
    let grid = &ls.grid;
    let c = &ls.comps[j];
    let n = grid.cells();
    let mut set = CellSet::empty(grid);
    let mut inexact = false;
    for i in 0..n {
        set.cells[i] = c.cell_bp[i].is_yes();
        inexact |= c.cell_bp[i] == Decision::Unknown;
    }
    for i in 0..=n {
        let interior = grid.closed || (i > 0 && i < n);
        if !interior {
            continue;
        }
        let (lc, rc) = if grid.closed && (i == 0 || i == n) { (n - 1, 0) } else { (i - 1, i) };
        if !(set.cells[lc] && set.cells[rc]) {
            continue;
        }
        let d = c.left[i].bp.and(c.right[i].bp);
        inexact |= d == Decision::Unknown;
        if d.is_yes() {
            set.left[i] = true;
            set.right[i] = true;
        }
    }
    set.sync_closed(grid);
    (set, inexact)
}

/// Whether the side of weight `w_i` (index `i`) makes a half-point
/// `j`-regular: the weight is `B_p` there, or bounded below by a power
/// `|t - z|^delta` with `delta < (i - j) p - 1`.
fn side_regular(side: &SideInfo, cell_bp: Decision, cell_positive: bool, i: usize, j: usize, p: f64) -> Decision {
    let via_bp = if cell_bp.is_yes() { side.bp } else { side.bp.and(cell_bp) };
    let via_power = match side.lower_exponent {
        Some(delta) if cell_positive && delta < (i - j) as f64 * p - 1.0 => Decision::Yes,
        _ => Decision::No,
    };
    via_bp.or(via_power)
}

/// `Omega^(j)` on the grid of `ls` (`j < k`), and whether it is inexact.
pub fn regular_cells(ls: &LocalStructure, j: usize) -> (CellSet, bool) {
    let grid = &ls.grid;
    let k = ls.k();
    let n = grid.cells();
    let mut set = CellSet::empty(grid);
    let mut inexact = false;
    let higher: &[ComponentLocal] = if j < k { &ls.comps[j + 1..] } else { &[] };
    for cell in 0..n {
        let d = higher.iter().fold(Decision::No, |acc, c| acc.or(c.cell_bp[cell]));
        set.cells[cell] = d.is_yes();
        inexact |= d == Decision::Unknown;
    }
    let half = |i: usize, right: bool, cell: usize| -> Decision {
        let mut d = Decision::No;
        for (off, c) in higher.iter().enumerate() {
            let side = if right { &c.right[i] } else { &c.left[i] };
            d = d.or(side_regular(side, c.cell_bp[cell], c.cell_positive[cell], j + 1 + off, j, ls.p));
        }
        d
    };
    for i in 0..=n {
        // Right half of b_i opens onto cell i; left half onto cell i-1.
        let right_cell = if i < n {
            Some(i)
        } else if grid.closed {
            Some(0)
        } else {
            None
        };
        let left_cell = if i > 0 {
            Some(i - 1)
        } else if grid.closed {
            Some(n - 1)
        } else {
            None
        };
        if let Some(cell) = right_cell {
            if set.cells[cell] {
                let d = half(if i == n { 0 } else { i }, true, cell);
                inexact |= d == Decision::Unknown;
                set.right[i] = d.is_yes();
            }
        }
        if let Some(cell) = left_cell {
            if set.cells[cell] {
                let d = half(if i == 0 { n } else { i }, false, cell);
                inexact |= d == Decision::Unknown;
                set.left[i] = d.is_yes();
            }
        }
    }
    set.sync_closed(grid);
    (set, inexact)
}

/// Report of one regular set `Omega^(j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSet {
    pub j: usize,
    pub components: Vec<ArcComponent>,
    pub inexact: bool,
}

/// Computes `Omega_0, ..., Omega_k`.
pub fn compute_omega(mu: &VectorialMeasure) -> Vec<OpenSetOnCurve> {
    let ls = LocalStructure::new(mu, &[]);
    (0..=ls.k()).map(|j| omega_report(&ls, j)).collect()
}

pub fn omega_report(ls: &LocalStructure, j: usize) -> OpenSetOnCurve {
    let (set, inexact) = omega_cells(ls, j);
    let grid = &ls.grid;
    let n = grid.cells();
    let endpoints = if grid.closed {
        Vec::new()
    } else {
        let c = &ls.comps[j];
        alloc::vec![EndpointStatus { t: 0.0, bp: c.right[0].bp }, EndpointStatus { t: grid.length, bp: c.left[n].bp },]
    };
    OpenSetOnCurve { components: set.components(grid), inexact, endpoints }
}

/// Computes `Omega^(0), ..., Omega^(k-1)`.
pub fn regular_sets(mu: &VectorialMeasure) -> Vec<RegularSet> {
    let ls = LocalStructure::new(mu, &[]);
    (0..ls.k())
        .map(|j| {
            let (set, inexact) = regular_cells(&ls, j);
            RegularSet { j, components: set.components(&ls.grid), inexact }
        })
        .collect()
}

fn bp_on_grid(c: &ComponentLocal, grid: &Grid, a: f64, b: f64) -> Decision {
    let ia = grid.index_of(a).expect("arc end on grid");
    let ib = grid.index_of(b).expect("arc end on grid");
    let mut d = c.right[ia].bp.and(c.left[ib].bp);
    for cell in ia..ib {
        d = d.and(c.cell_bp[cell]);
    }
    for i in ia + 1..ib {
        d = d.and(c.left[i].bp).and(c.right[i].bp);
    }
    d
}

/// Whether `w^{-1/(p-1)}` is integrable on the closed arc (`p = 1`: whether
/// `1/w` is essentially bounded). Wrapping arcs are allowed on closed curves.
pub fn bp_membership(mu: &VectorialMeasure, j: usize, arc: Arc) -> Result<Decision> {
    if j > mu.k() {
        return Err(Error::InvalidArgument(alloc::format!("component {j} does not exist")));
    }
    let curve = mu.curve();
    let len = curve.length();
    let (a, b) = (arc.t0, arc.t1);
    let wraps = curve.is_closed() && b < a;
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > len || (!wraps && b <= a) {
        return Err(Error::InvalidArgument("arc must satisfy 0 <= t0 < t1 <= L".into()));
    }
    let single = VectorialMeasure::new(curve.clone(), mu.p(), alloc::vec![mu.component(j).clone()])?;
    let ls = LocalStructure::new(&single, &[a, b]);
    let c = &ls.comps[0];
    if wraps {
        let tail = bp_on_grid(c, &ls.grid, a, len);
        let head = bp_on_grid(c, &ls.grid, 0.0, b);
        Ok(tail.and(head))
    } else {
        Ok(bp_on_grid(c, &ls.grid, a, b))
    }
}

/// `B_p` membership for a bare component on a curve of the given length.
pub fn component_bp(comp: &MeasureComponent, mu: &VectorialMeasure, arc: Arc) -> Result<Decision> {
    let single = VectorialMeasure::new(mu.curve().clone(), mu.p(), alloc::vec![comp.clone()])?;
    bp_membership(&single, 0, arc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;
    use crate::measure::{Atom, WeightPiece};
    use alloc::vec;
    use num_complex::Complex64;

    fn unit() -> Curve {
        Curve::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
    }

    fn seg11() -> Curve {
        Curve::segment(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn cube_weight_is_not_bp_up_to_zero() {
        let c = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![c]).unwrap();
        assert_eq!(bp_membership(&mu, 0, Arc::new(0.0, 1.0)).unwrap(), Decision::No);
        assert_eq!(bp_membership(&mu, 0, Arc::new(0.25, 1.0)).unwrap(), Decision::Yes);
        let om = compute_omega(&mu);
        assert_eq!(om[0].components.len(), 1);
        assert_eq!((om[0].components[0].t0, om[0].components[0].t1), (0.0, 1.0));
        assert_eq!(om[0].endpoints[0].bp, Decision::No);
        assert_eq!(om[0].endpoints[1].bp, Decision::Yes);
    }

    #[test]
    fn p_one_uses_essential_infimum() {
        let c = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 0.5, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 1.0, vec![c]).unwrap();
        assert_eq!(bp_membership(&mu, 0, Arc::new(0.0, 1.0)).unwrap(), Decision::No);
        let c = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, -0.5, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 1.0, vec![c]).unwrap();
        assert_eq!(bp_membership(&mu, 0, Arc::new(0.0, 1.0)).unwrap(), Decision::Yes);
    }

    /// The example with `mu_0 = delta_0`, `w_2 = chi_[-1,0]`, `w_3 = chi_[0,1]`.
    fn def33() -> VectorialMeasure {
        let c0 = MeasureComponent::atoms_only(vec![Atom { t: 1.0, mass: 1.0 }]);
        let c1 = MeasureComponent::default();
        let c2 = MeasureComponent::new(vec![WeightPiece::constant(0.0, 1.0, 1.0), WeightPiece::zero(1.0, 2.0)], vec![]);
        let c3 = MeasureComponent::new(vec![WeightPiece::zero(0.0, 1.0), WeightPiece::constant(1.0, 2.0, 1.0)], vec![]);
        VectorialMeasure::new(seg11(), 2.0, vec![c0, c1, c2, c3]).unwrap()
    }

    #[test]
    fn omega_of_step_weights() {
        let om = compute_omega(&def33());
        assert!(om[0].components.is_empty() && om[1].components.is_empty());
        assert_eq!(om[2].components.len(), 1);
        let c = om[2].components[0];
        assert_eq!((c.t0, c.t1, c.start_closed, c.end_closed), (0.0, 1.0, false, false));
        let c = om[3].components[0];
        assert_eq!((c.t0, c.t1), (1.0, 2.0));
    }

    #[test]
    fn regular_sets_of_step_weights() {
        let rs = regular_sets(&def33());
        for j in 0..2 {
            assert_eq!(rs[j].components.len(), 1, "j = {j}");
            let c = rs[j].components[0];
            assert_eq!((c.t0, c.t1, c.start_closed, c.end_closed), (0.0, 2.0, true, true));
        }
        assert_eq!(rs[2].components.len(), 1);
        let c = rs[2].components[0];
        assert_eq!((c.t0, c.t1, c.start_closed, c.end_closed), (1.0, 2.0, true, true));
    }

    #[test]
    fn regularity_through_lower_power_bound() {
        // w_2 = x^2 on [0,1] with p = 2: (b) holds at 0 for j = 0 (2 < 3) but
        // not for j = 1 (2 < 1 fails); (a) fails since 2 * 1 >= 1.
        let c2 = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 2.0, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), MeasureComponent::default(), c2])
            .unwrap();
        let rs = regular_sets(&mu);
        assert!(rs[0].components[0].start_closed);
        assert!(!rs[1].components[0].start_closed);
    }

    #[test]
    fn closed_curve_omega_is_whole_circle() {
        let circle = Curve::full_circle(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let l = circle.length();
        let mu = VectorialMeasure::new(circle, 2.0, vec![MeasureComponent::lebesgue(l, 1.0)]).unwrap();
        let om = compute_omega(&mu);
        assert_eq!(om[0].components.len(), 1);
        assert!(om[0].components[0].full);
        assert!(om[0].endpoints.is_empty());
    }
}
