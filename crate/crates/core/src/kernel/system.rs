//! Components of `Omega_1 u ... u Omega_k`, their polynomial degrees, and
//! the homogeneous system of atom and pasting conditions.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::PolyPiece;
use crate::error::{Error, Result};
use crate::measure::{Region, VectorialMeasure};
use crate::weight::local::{Grid, LocalStructure};
use crate::weight::omega::{omega_cells, regular_cells};
use crate::weight::sets::{ArcComponent, CellSet, Run};

/// One component `Lambda` of `Omega_1 u ... u Omega_k` (inside the region).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelComponent {
    pub arc: ArcComponent,
    /// Smallest `m > 0` with `Omega_m` meeting the component.
    pub j_upper: usize,
    /// Kernel elements are polynomials of degree `< j_lower` here.
    pub j_lower: usize,
    /// Frame of the local basis `((z - center) / scale)^i`.
    pub center: Complex64,
    pub scale: f64,
    #[serde(skip)]
    pub(crate) cells: Vec<usize>,
    #[serde(skip)]
    pub(crate) start: usize,
    #[serde(skip)]
    pub(crate) end: usize,
}

/// A point `beta` between two components where `f, f', ..., f^(orders-1)`
/// are continuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PastingPoint {
    pub t: f64,
    /// Component ending at `beta`.
    pub left: usize,
    /// Component starting at `beta`.
    pub right: usize,
    pub orders: usize,
}

/// `f^(order)` must vanish at `t` on a component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintAtom {
    pub component: usize,
    pub t: f64,
    pub order: usize,
    pub mass: f64,
}

/// An atom of `mu_j` charging `Omega^(0)`, with the components whose
/// polynomial gives the value of `f^(j)` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAtom {
    pub j: usize,
    pub t: f64,
    pub mass: f64,
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    pub components: Vec<KernelComponent>,
    pub pasting: Vec<PastingPoint>,
    pub atoms: Vec<ConstraintAtom>,
    pub norm_atoms: Vec<NormAtom>,
    /// Components of `Omega^(0)` inside the region; kernel elements are
    /// only defined there.
    pub omega0: Vec<ArcComponent>,
    pub region: Option<Region>,
    /// Some `Omega` set was only approximated from inside.
    pub inexact: bool,
}

fn check_region(mu: &VectorialMeasure, region: &Region) -> Result<()> {
    let l = mu.curve().length();
    if region.arcs.is_empty() {
        return Err(Error::InvalidArgument("region has no arcs".into()));
    }
    for a in &region.arcs {
        if !(a.t0.is_finite() && a.t1.is_finite() && a.t0 >= 0.0 && a.t1 <= l && a.t0 < a.t1) {
            return Err(Error::InvalidArgument(format!(
                "region arc [{}, {}] is not a proper arc of the parameter range [0, {l}]",
                a.t0, a.t1
            )));
        }
    }
    Ok(())
}

/// Decomposes `Omega_1 u ... u Omega_k`, optionally intersected with a
/// region, into components with their degrees and constraints.
pub fn decompose_components(mu: &VectorialMeasure, region: Option<&Region>) -> Result<ComponentDecomposition> {
    if let Some(r) = region {
        check_region(mu, r)?;
    }
    let extra = region.map(|r| r.endpoints()).unwrap_or_default();
    let ls = LocalStructure::new(mu, &extra);
    Ok(build(&ls, mu, region))
}

/// Whether grid indices `a` and `b` name the same point.
fn same_point(grid: &Grid, a: usize, b: usize) -> bool {
    let n = grid.cells();
    a == b || (grid.closed && (a % n) == (b % n))
}

/// Where a grid point sits relative to a run.
enum Place {
    Interior,
    Start,
    End,
    Both,
    Outside,
}

fn place(grid: &Grid, run: &Run, i: usize) -> Place {
    if run.arc.full {
        return Place::Interior;
    }
    let at_start = same_point(grid, i, run.start);
    let at_end = same_point(grid, i, run.end);
    match (at_start, at_end) {
        (true, true) => return Place::Both,
        (true, false) => return Place::Start,
        (false, true) => return Place::End,
        _ => {}
    }
    let n = grid.cells();
    // Interior grid points are those between two consecutive run cells.
    let inside = run.cells.windows(2).any(|w| {
        let next = if grid.closed { (w[0] + 1) % n } else { w[0] + 1 };
        w[1] == next && same_point(grid, i, w[0] + 1)
    });
    if inside {
        Place::Interior
    } else {
        Place::Outside
    }
}

/// Whether the half of point `i` facing the run lies in `set`. On closed
/// curves both copies of the seam point carry the same flags.
fn facing_half(set: &CellSet, grid: &Grid, run: &Run, i: usize) -> bool {
    match place(grid, run, i) {
        Place::Interior => set.left[i] && set.right[i],
        Place::Start => set.right[i],
        Place::End => set.left[i],
        Place::Both => set.right[i] || set.left[i],
        Place::Outside => false,
    }
}

fn frame(mu: &VectorialMeasure, arc: &ArcComponent) -> (Complex64, f64) {
    let l = mu.curve().length();
    let len = arc.length(l);
    let samples: Vec<Complex64> = (0..=16).map(|i| mu.curve().point(arc.t0 + len * i as f64 / 16.0)).collect();
    let center = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let scale = samples.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    (center, if scale > 0.0 { scale } else { 1.0 })
}

pub(crate) fn build(ls: &LocalStructure, mu: &VectorialMeasure, region: Option<&Region>) -> ComponentDecomposition {
    let grid = &ls.grid;
    let n = grid.cells();
    let k = ls.k();
    let mask = |s: CellSet| match region {
        Some(r) => s.masked(grid, r),
        None => s,
    };
    let mut inexact = false;
    let omegas: Vec<CellSet> = (0..=k)
        .map(|j| {
            let (s, ix) = omega_cells(ls, j);
            inexact |= ix;
            s
        })
        .collect();
    let regs: Vec<CellSet> = (0..k)
        .map(|j| {
            let (s, ix) = regular_cells(ls, j);
            inexact |= ix;
            mask(s)
        })
        .collect();
    let upper: Vec<&CellSet> = omegas.iter().skip(1).collect();
    let u = if k == 0 { CellSet::empty(grid) } else { mask(CellSet::union_open(&upper, grid)) };
    let runs = u.runs(grid);
    let omega0 = if k > 0 { regs[0].components(grid) } else { Vec::new() };

    let mut components = Vec::with_capacity(runs.len());
    let mut atoms = Vec::new();
    for (ci, run) in runs.iter().enumerate() {
        let j_upper = (1..=k).find(|m| run.cells.iter().any(|c| omegas[*m].cells[*c])).unwrap_or(k);
        let mut j_lower = j_upper;
        let mut per_order: Vec<Vec<(f64, f64)>> = Vec::new();
        for m in 0..j_upper {
            let ac = run.cells.iter().any(|c| ls.comps[m].cell_positive[*c]);
            let mut hits: Vec<(f64, f64)> = Vec::new();
            for a in &mu.component(m).atoms {
                if let Some(i) = grid.index_of(a.t) {
                    if facing_half(&regs[m], grid, run, i)
                        && region.is_none_or(|r| r.contains_point(a.t) || touches(r, a.t, grid))
                    {
                        hits.push((a.t, a.mass));
                    }
                }
            }
            let enough = ac || hits.len() >= j_upper - m;
            per_order.push(hits);
            if enough {
                j_lower = m;
                break;
            }
        }
        for (m, hits) in per_order.iter().enumerate().take(j_lower) {
            for &(t, mass) in hits {
                atoms.push(ConstraintAtom { component: ci, t, order: m, mass });
            }
        }
        let (center, scale) = frame(mu, &run.arc);
        components.push(KernelComponent {
            arc: run.arc,
            j_upper,
            j_lower,
            center,
            scale,
            cells: run.cells.clone(),
            start: run.start,
            end: run.end,
        });
    }

    let mut pasting = Vec::new();
    for (a, ra) in runs.iter().enumerate() {
        if ra.arc.full {
            continue;
        }
        for (b, rb) in runs.iter().enumerate() {
            if !same_point(grid, ra.end, rb.start) {
                continue;
            }
            let i = ra.end;
            let orders = regs.iter().take_while(|s| s.left[i] && s.right[i]).count();
            if orders > 0 {
                let t = if grid.closed && i == n { 0.0 } else { grid.points[i] };
                pasting.push(PastingPoint { t, left: a, right: b, orders });
            }
        }
    }

    let mut norm_atoms = Vec::new();
    if k > 0 {
        for j in 0..=k {
            for a in &mu.component(j).atoms {
                let Some(i) = grid.index_of(a.t) else { continue };
                if let Some(r) = region {
                    if !(r.contains_point(a.t) || touches(r, a.t, grid)) {
                        continue;
                    }
                }
                let facing: Vec<usize> =
                    (0..runs.len()).filter(|c| facing_half(&regs[0], grid, &runs[*c], i)).collect();
                if facing.is_empty() {
                    continue;
                }
                let preferred: Vec<usize> = if j < k {
                    facing.iter().copied().filter(|c| facing_half(&regs[j], grid, &runs[*c], i)).collect()
                } else {
                    Vec::new()
                };
                let comps = if preferred.is_empty() { facing } else { preferred };
                norm_atoms.push(NormAtom { j, t: a.t, mass: a.mass, components: comps });
            }
        }
    }

    ComponentDecomposition { components, pasting, atoms, norm_atoms, omega0, region: region.cloned(), inexact }
}

/// The seam point of a closed curve belongs to a region through either of
/// its parameter values.
fn touches(r: &Region, t: f64, grid: &Grid) -> bool {
    grid.closed && t == 0.0 && r.contains_point(grid.length)
}

/// Which equation a row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquationKind {
    /// `f^(order)(t) = 0` on a component.
    Atom { component: usize, t: f64, order: usize },
    /// `f^(order)(t-) = f^(order)(t+)`.
    Paste { t: f64, left: usize, right: usize, order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub kind: EquationKind,
    /// Coefficients against all unknowns, scaled to unit length.
    pub row: Vec<Complex64>,
}

/// Unknown coefficients of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnknownBlock {
    pub component: usize,
    pub offset: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSystem {
    pub decomposition: ComponentDecomposition,
    pub unknowns: Vec<UnknownBlock>,
    pub columns: usize,
    pub equations: Vec<Equation>,
}

impl KernelSystem {
    pub fn block(&self, component: usize) -> &UnknownBlock {
        &self.unknowns[component]
    }
}

/// Builds the homogeneous system whose solutions are the kernel elements.
pub fn assemble_kernel_system(mu: &VectorialMeasure, region: Option<&Region>) -> Result<KernelSystem> {
    let dec = decompose_components(mu, region)?;
    Ok(assemble_from(mu, dec))
}

pub(crate) fn assemble_from(mu: &VectorialMeasure, dec: ComponentDecomposition) -> KernelSystem {
    let mut unknowns = Vec::with_capacity(dec.components.len());
    let mut offset = 0;
    for (i, c) in dec.components.iter().enumerate() {
        unknowns.push(UnknownBlock { component: i, offset, count: c.j_lower });
        offset += c.j_lower;
    }
    let columns = offset;
    let curve = mu.curve();
    let mut equations = Vec::new();
    let push = |kind: EquationKind, mut row: Vec<Complex64>, equations: &mut Vec<Equation>| {
        let norm = libm::sqrt(row.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if norm > 0.0 {
            for x in row.iter_mut() {
                *x /= norm;
            }
            equations.push(Equation { kind, row });
        }
    };
    for a in &dec.atoms {
        let c = &dec.components[a.component];
        let b = &unknowns[a.component];
        let mut row = alloc::vec![Complex64::new(0.0, 0.0); columns];
        let local = PolyPiece::derivative_row(c.center, c.scale, b.count, curve.point(a.t), a.order);
        row[b.offset..b.offset + b.count].copy_from_slice(&local);
        push(EquationKind::Atom { component: a.component, t: a.t, order: a.order }, row, &mut equations);
    }
    for ps in &dec.pasting {
        let z = curve.point(ps.t);
        let (cl, cr) = (&dec.components[ps.left], &dec.components[ps.right]);
        let (bl, br) = (unknowns[ps.left], unknowns[ps.right]);
        for order in 0..ps.orders {
            let h = cl.scale.min(cr.scale);
            let mut row = alloc::vec![Complex64::new(0.0, 0.0); columns];
            let sl = libm::pow(h / cl.scale, order as f64);
            let sr = libm::pow(h / cr.scale, order as f64);
            for (i, v) in PolyPiece::derivative_row(cl.center, cl.scale, bl.count, z, order).into_iter().enumerate() {
                row[bl.offset + i] += v * sl;
            }
            for (i, v) in PolyPiece::derivative_row(cr.center, cr.scale, br.count, z, order).into_iter().enumerate() {
                row[br.offset + i] -= v * sr;
            }
            // Rows that cancel exactly (a component pasted to itself) carry no
            // information.
            let max = row.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if max > 1e-13 {
                push(EquationKind::Paste { t: ps.t, left: ps.left, right: ps.right, order }, row, &mut equations);
            }
        }
    }
    KernelSystem { decomposition: dec, unknowns, columns, equations }
}
