//! Subsets of a curve built from grid cells and half-points.
//!
//! A grid point `b` has two halves `b-` and `b+`. A set contains `b` when it
//! contains both halves (or the only half, at an end of an open curve).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::local::Grid;
use crate::measure::Region;

/// A union of open cells and half-points on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSet {
    pub cells: Vec<bool>,
    /// `left[i]`: the half-point `b_i-` belongs to the set.
    pub left: Vec<bool>,
    /// `right[i]`: the half-point `b_i+` belongs to the set.
    pub right: Vec<bool>,
}

/// A connected component of a set on the curve, as a parameter arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcComponent {
    pub t0: f64,
    pub t1: f64,
    /// The start point belongs to the component.
    pub start_closed: bool,
    /// The end point belongs to the component.
    pub end_closed: bool,
    /// The component is the whole closed curve.
    #[serde(default)]
    pub full: bool,
}

impl ArcComponent {
    /// Whether the component wraps through `t = 0` on a closed curve.
    pub fn wraps(&self) -> bool {
        !self.full && self.t1 <= self.t0
    }

    /// Parameter length of the component.
    pub fn length(&self, curve_length: f64) -> f64 {
        if self.full {
            curve_length
        } else if self.wraps() {
            self.t1 + curve_length - self.t0
        } else {
            self.t1 - self.t0
        }
    }

    /// Whether `t` belongs to the closure of the component.
    pub fn closure_contains(&self, t: f64) -> bool {
        if self.full {
            return true;
        }
        if self.wraps() {
            t >= self.t0 || t <= self.t1
        } else {
            t >= self.t0 && t <= self.t1
        }
    }

    /// Whether `t` belongs to the component itself.
    pub fn contains(&self, t: f64) -> bool {
        if self.full {
            return true;
        }
        if t == self.t0 {
            return self.start_closed;
        }
        if t == self.t1 {
            return self.end_closed;
        }
        if self.wraps() {
            t > self.t0 || t < self.t1
        } else {
            t > self.t0 && t < self.t1
        }
    }
}

/// Element of the traversal order: a half-point or a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    Right(usize),
    Cell(usize),
    Left(usize),
}

/// A component together with the grid indices it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub arc: ArcComponent,
    /// Cells in traversal order.
    pub cells: Vec<usize>,
    /// Grid index of the start and end points.
    pub start: usize,
    pub end: usize,
}

impl CellSet {
    pub fn empty(grid: &Grid) -> CellSet {
        let n = grid.cells();
        CellSet { cells: alloc::vec![false; n], left: alloc::vec![false; n + 1], right: alloc::vec![false; n + 1] }
    }

    fn present(&self, e: Elem) -> bool {
        match e {
            Elem::Right(i) => self.right[i],
            Elem::Cell(i) => self.cells[i],
            Elem::Left(i) => self.left[i],
        }
    }

    /// Keeps the two copies of the closing point of a closed curve in sync.
    pub fn sync_closed(&mut self, grid: &Grid) {
        if grid.closed {
            let n = grid.cells();
            let l = self.left[0] || self.left[n];
            let r = self.right[0] || self.right[n];
            self.left[0] = l;
            self.left[n] = l;
            self.right[0] = r;
            self.right[n] = r;
        }
    }

    /// Whether grid point `i` belongs to the set.
    pub fn contains_grid_point(&self, grid: &Grid, i: usize) -> bool {
        let n = grid.cells();
        if !grid.closed && i == 0 {
            return self.right[0];
        }
        if !grid.closed && i == n {
            return self.left[n];
        }
        self.left[i] && self.right[i]
    }

    /// Membership of an arbitrary parameter.
    pub fn contains(&self, grid: &Grid, t: f64) -> bool {
        match grid.index_of(t) {
            Some(i) => self.contains_grid_point(grid, i),
            None => self.cells[grid.cell_of(t)],
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|c| *c)
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let or = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| *x || *y).collect();
        CellSet {
            cells: or(&self.cells, &other.cells),
            left: or(&self.left, &other.left),
            right: or(&self.right, &other.right),
        }
    }

    /// Union of open sets: a grid point belongs to the union only when it
    /// belongs to one of the sets (both halves from the same set).
    pub fn union_open(sets: &[&CellSet], grid: &Grid) -> CellSet {
        let mut out = CellSet::empty(grid);
        for s in sets {
            for i in 0..grid.cells() {
                out.cells[i] |= s.cells[i];
            }
            for i in 0..=grid.cells() {
                let both = s.left[i] && s.right[i];
                out.left[i] |= both;
                out.right[i] |= both;
            }
        }
        out
    }

    /// Restriction to a region (half-point aware).
    pub fn masked(&self, grid: &Grid, region: &Region) -> CellSet {
        let mut out = self.clone();
        for i in 0..grid.cells() {
            if !region.contains_open(grid.points[i], grid.points[i + 1]) {
                out.cells[i] = false;
            }
        }
        let n = grid.cells();
        for i in 0..=n {
            let t = grid.points[i];
            // On a closed curve the point 0 = L may be described by either end.
            let seam = grid.closed && (i == 0 || i == n);
            let half = |right: bool| {
                region.contains_half(t, right)
                    || (seam && region.contains_half(if i == 0 { grid.length } else { 0.0 }, right))
            };
            if !half(false) {
                out.left[i] = false;
            }
            if !half(true) {
                out.right[i] = false;
            }
        }
        out
    }

    fn sequence(grid: &Grid) -> Vec<Elem> {
        let n = grid.cells();
        let mut seq = Vec::with_capacity(3 * n);
        for i in 0..n {
            seq.push(Elem::Right(i));
            seq.push(Elem::Cell(i));
            seq.push(Elem::Left(i + 1));
        }
        seq
    }

    /// Connected components, in increasing parameter order of their start.
    /// Runs without any cell (isolated half-points) are dropped.
    pub fn runs(&self, grid: &Grid) -> Vec<Run> {
        let seq = CellSet::sequence(grid);
        let m = seq.len();
        let flags: Vec<bool> = seq.iter().map(|e| self.present(*e)).collect();
        let mut runs = Vec::new();
        if grid.closed {
            if flags.iter().all(|f| *f) {
                let cells = (0..grid.cells()).collect();
                let arc = ArcComponent { t0: 0.0, t1: grid.length, start_closed: true, end_closed: true, full: true };
                return alloc::vec![Run { arc, cells, start: 0, end: grid.cells() }];
            }
            // Start scanning right after an absent element so runs do not split.
            let Some(gap) = flags.iter().position(|f| !*f) else { unreachable!() };
            let mut idx = 0;
            while idx < m {
                let pos = (gap + 1 + idx) % m;
                if !flags[pos] {
                    idx += 1;
                    continue;
                }
                let mut elems = Vec::new();
                while idx < m && flags[(gap + 1 + idx) % m] {
                    elems.push(seq[(gap + 1 + idx) % m]);
                    idx += 1;
                }
                if let Some(r) = make_run(&elems, grid) {
                    runs.push(r);
                }
            }
            runs.sort_by(|a, b| a.arc.t0.total_cmp(&b.arc.t0));
        } else {
            let mut idx = 0;
            while idx < m {
                if !flags[idx] {
                    idx += 1;
                    continue;
                }
                let mut elems = Vec::new();
                while idx < m && flags[idx] {
                    elems.push(seq[idx]);
                    idx += 1;
                }
                if let Some(r) = make_run(&elems, grid) {
                    runs.push(r);
                }
            }
        }
        runs
    }

    pub fn components(&self, grid: &Grid) -> Vec<ArcComponent> {
        self.runs(grid).into_iter().map(|r| r.arc).collect()
    }
}

fn make_run(elems: &[Elem], grid: &Grid) -> Option<Run> {
    let cells: Vec<usize> = elems.iter().filter_map(|e| if let Elem::Cell(i) = e { Some(*i) } else { None }).collect();
    if cells.is_empty() {
        return None;
    }
    let start = cells[0];
    let end = *cells.last().unwrap() + 1;
    let start_closed = matches!(elems[0], Elem::Right(_));
    let end_closed = matches!(elems[elems.len() - 1], Elem::Left(_));
    // On a closed curve a run may wrap through t = 0; then t1 < t0.
    let arc = ArcComponent { t0: grid.points[start], t1: grid.points[end], start_closed, end_closed, full: false };
    Some(Run { arc, cells, start, end })
}

/// An open set of the curve reported with the grid it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenSetOnCurve {
    pub components: Vec<ArcComponent>,
    /// Some membership question could not be decided; the set is an inner
    /// approximation.
    pub inexact: bool,
    /// One-sided `B_p` status at the ends of an open curve, which the
    /// open set itself excludes.
    pub endpoints: Vec<EndpointStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointStatus {
    pub t: f64,
    pub bp: super::local::Decision,
}
