//! Deciding the exhaustion class `C_0` where a covering theorem applies.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{compute_kernel, KernelReport, KernelSystem};
use crate::error::Result;
use crate::measure::{Region, RegionArc, VectorialMeasure};
use crate::weight::admissible::admissibility;
use crate::weight::local::{Decision, LocalStructure};
use crate::weight::omega::omega_cells;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C0Justification {
    /// Every kernel element is piecewise linear on `Omega_1 u ... u Omega_k`.
    TheoremCc0,
    /// Every component meets `Omega_0 u Omega_1 u Omega_2`.
    TheoremCc02,
    /// `k = 1` or `k = 2`.
    TheoremCc03,
    /// Finitely many points of `Omega^(0)` outside `Omega_1 u ... u Omega_k`
    /// per component.
    FiniteComponentsRemark,
    NotCovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct C0Options {
    /// The measure is a truncation standing for an infinite family; facts
    /// that hold only because a measure has finitely many components are
    /// not used.
    pub truncated_family: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Report {
    pub in_c0: Decision,
    pub justification: C0Justification,
    pub kernel_dim: usize,
    /// First compact sets `M_n` of an exhaustion with trivial kernel.
    pub witness: Vec<Region>,
    pub witness_verified: bool,
    pub notes: Vec<String>,
}

/// Decides `(gamma, mu) in C_0`. Every covering result states
/// `C_0 <=> K = 0`, so the answer is read off the kernel once one applies.
pub fn check_c0(mu: &VectorialMeasure, opts: C0Options) -> Result<C0Report> {
    let (sys, kernel) = compute_kernel(mu, None)?;
    let mut notes = Vec::new();
    let mut report = C0Report {
        in_c0: Decision::Unknown,
        justification: C0Justification::NotCovered,
        kernel_dim: kernel.dim,
        witness: Vec::new(),
        witness_verified: false,
        notes: Vec::new(),
    };
    let adm = admissibility(mu);
    if adm.admissible != Decision::Yes {
        notes.push(String::from("the measure is not known to be p-admissible"));
        report.notes = notes;
        return Ok(report);
    }
    if kernel.inexact || kernel.low_confidence {
        notes.push(String::from("the kernel dimension is not certain"));
        report.notes = notes;
        return Ok(report);
    }
    let justification = covering(mu, &sys, opts);
    report.justification = justification;
    if justification == C0Justification::NotCovered {
        notes.push(String::from(
            "no covering result applies: some component needs quadratic or higher pieces and the measure stands for an infinite family",
        ));
        report.notes = notes;
        return Ok(report);
    }
    if kernel.dim > 0 {
        report.in_c0 = Decision::No;
        notes.push(format!("K has dimension {}; membership in C_0 forces K = 0", kernel.dim));
    } else {
        report.in_c0 = Decision::Yes;
        let (witness, ok) = witness(mu, &sys, &kernel)?;
        report.witness = witness;
        report.witness_verified = ok;
    }
    report.notes = notes;
    Ok(report)
}

fn covering(mu: &VectorialMeasure, sys: &KernelSystem, opts: C0Options) -> C0Justification {
    let k = mu.k();
    if k == 1 || k == 2 {
        return C0Justification::TheoremCc03;
    }
    let comps = &sys.decomposition.components;
    if k > 2 {
        let ls = LocalStructure::new(mu, &[]);
        let (omega0, _) = omega_cells(&ls, 0);
        let meets = comps.iter().all(|c| {
            c.j_upper <= 2
                || c.arc.full && omega0.cells.iter().any(|x| *x)
                || (0..ls.grid.cells()).any(|cell| omega0.cells[cell] && c.arc.contains(ls.grid.mid(cell)))
        });
        if meets {
            return C0Justification::TheoremCc02;
        }
        if comps.iter().all(|c| c.j_lower <= 2) {
            return C0Justification::TheoremCc0;
        }
    }
    if opts.truncated_family {
        C0Justification::NotCovered
    } else {
        C0Justification::FiniteComponentsRemark
    }
}

/// Compact exhaustions of `Omega^(0)`: open ends are pulled in by a margin
/// that halves with `n`, smaller than every cell so no constraint is lost.
fn witness(mu: &VectorialMeasure, sys: &KernelSystem, _kernel: &KernelReport) -> Result<(Vec<Region>, bool)> {
    let l = mu.curve().length();
    let omega0 = &sys.decomposition.omega0;
    if omega0.is_empty() {
        return Ok((Vec::new(), true));
    }
    let pts = mu.candidate_points();
    let min_gap = pts.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(l, f64::min);
    let mut regions = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let margin = min_gap * 0.25 * libm::ldexp(1.0, -n);
        let mut arcs = Vec::new();
        for c in omega0 {
            if c.full {
                arcs.push(RegionArc { t0: 0.0, t1: l, start_closed: true, end_closed: true });
                continue;
            }
            let t0 = if c.start_closed { c.t0 } else { c.t0 + margin };
            let t1 = if c.end_closed { c.t1 } else { c.t1 - margin };
            if c.wraps() {
                arcs.push(RegionArc { t0, t1: l, start_closed: true, end_closed: true });
                arcs.push(RegionArc { t0: 0.0, t1, start_closed: true, end_closed: true });
            } else {
                arcs.push(RegionArc { t0, t1, start_closed: true, end_closed: true });
            }
        }
        let region = Region { arcs };
        let (_, kn) = compute_kernel(mu, Some(&region))?;
        ok &= kn.dim == 0;
        regions.push(region);
    }
    Ok((regions, ok))
}
