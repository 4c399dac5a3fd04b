//! Type A: a partition `a_1 < ... < a_n` of the curve such that on every arc
//! one of five local conditions holds.
//!
//! Candidate partition points are the grid points (piece boundaries, atoms,
//! zero-set ends). Arcs are tried from the finest cell outwards: an arc is
//! only merged with its neighbours when no case holds on it alone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::curve::Arc;
use crate::measure::{MeasureComponent, VectorialMeasure, WeightForm};
use crate::weight::admissible::{admissibility_on, annotated_consistency, AdmissibilityReport};
use crate::weight::local::{ComponentLocal, Decision, LocalStructure};
use crate::weight::muckenhoupt::{muckenhoupt, LambdaStatus, Side, DEFAULT_DEPTH};
use crate::weight::omega::regular_cells;
use crate::weight::CellSet;

/// One arc `[t0, t1]` of a type A partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAArc {
    pub t0: f64,
    pub t1: f64,
    pub k1: usize,
    pub k2: usize,
    /// Case `1..=5` of the definition.
    pub case: u8,
    /// `5'` or `5''` when case 5 was reached through the one-sided
    /// sufficient conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAReport {
    pub is_type_a: Decision,
    pub strongly_admissible: Decision,
    /// `a_1 < ... < a_n` (empty when no partition was found).
    pub partition: Vec<f64>,
    pub arcs: Vec<TypeAArc>,
    pub failures: Vec<String>,
}

/// Classifies `mu` as type A.
pub fn classify_type_a(mu: &VectorialMeasure) -> TypeAReport {
    let ls = LocalStructure::new(mu, &[]);
    let adm = admissibility_on(&ls, mu);
    type_a_on(mu, &ls, &adm)
}

fn power_midpoints(mu: &VectorialMeasure) -> Vec<f64> {
    fn two_sided(form: &WeightForm) -> bool {
        match form {
            WeightForm::Power { alpha_left, alpha_right, anchor_left, anchor_right, .. } => {
                anchor_left.is_none() && *alpha_left != 0.0 && anchor_right.is_none() && *alpha_right != 0.0
            }
            WeightForm::Sum { terms } => terms.iter().any(two_sided),
            _ => false,
        }
    }
    mu.components()
        .iter()
        .skip(1)
        .flat_map(|c| &c.pieces)
        .filter(|p| two_sided(&p.form))
        .map(|p| 0.5 * (p.arc.t0 + p.arc.t1))
        .collect()
}

struct Ctx<'a> {
    mu: &'a VectorialMeasure,
    ls: &'a LocalStructure,
    /// `Omega^(j)` for `0 <= j < k`.
    regs: Vec<CellSet>,
    memo: BTreeMap<(usize, usize, usize, bool), Decision>,
}

struct ArcEval {
    arc: Option<TypeAArc>,
    reasons: Vec<String>,
}

pub(crate) fn type_a_on(mu: &VectorialMeasure, ls: &LocalStructure, adm: &AdmissibilityReport) -> TypeAReport {
    let mut report = TypeAReport {
        is_type_a: Decision::No,
        strongly_admissible: adm.strongly_admissible,
        partition: Vec::new(),
        arcs: Vec::new(),
        failures: Vec::new(),
    };
    if adm.strongly_admissible != Decision::Yes {
        report.is_type_a = adm.strongly_admissible;
        report.failures.push(String::from("the measure is not known to be strongly p-admissible"));
        report.failures.extend(adm.violations.iter().chain(&adm.strong_violations).map(|v| v.reason.clone()));
        return report;
    }
    // Power pieces are monotone up to constants only on each half, so their
    // midpoints must be available as partition points.
    let splits = power_midpoints(mu);
    let refined;
    let ls = if splits.is_empty() {
        ls
    } else {
        refined = LocalStructure::new(mu, &splits);
        &refined
    };
    let k = mu.k();
    let regs = (0..k).map(|j| regular_cells(ls, j).0).collect();
    let mut ctx = Ctx { mu, ls, regs, memo: BTreeMap::new() };
    let n = ls.grid.cells();
    let pts = &ls.grid.points;

    // reach[m]: best decision for a partition of [b_0, b_m]; pred[m]: last arc.
    let mut reach = alloc::vec![Decision::No; n + 1];
    let mut pred: Vec<Option<(usize, TypeAArc)>> = alloc::vec![None; n + 1];
    reach[0] = Decision::Yes;
    let mut first_failure: Option<String> = None;
    for i in 0..n {
        if reach[i] == Decision::No {
            continue;
        }
        for m in i + 1..=n {
            if reach[m] == Decision::Yes {
                continue;
            }
            let ev = ctx.eval_arc(i, m);
            match ev.arc {
                Some(arc) => {
                    let d = arc.decision.and(reach[i]);
                    if better(d, reach[m]) {
                        reach[m] = d;
                        pred[m] = Some((i, arc));
                    }
                    if d == Decision::Yes {
                        break;
                    }
                }
                None => {
                    if m == i + 1 && first_failure.is_none() {
                        first_failure =
                            Some(format!("no case holds on [{}, {}]: {}", pts[i], pts[m], ev.reasons.join("; ")));
                    }
                }
            }
        }
    }
    report.is_type_a = reach[n];
    if reach[n] == Decision::No {
        report.failures.extend(first_failure);
        return report;
    }
    let mut arcs = Vec::new();
    let mut m = n;
    while m > 0 {
        let (i, arc) = pred[m].clone().expect("reachable point has a predecessor");
        arcs.push(arc);
        m = i;
    }
    arcs.reverse();
    report.partition = core::iter::once(arcs[0].t0).chain(arcs.iter().map(|a| a.t1)).collect();
    report.arcs = arcs;
    report
}

fn better(a: Decision, b: Decision) -> bool {
    matches!((a, b), (Decision::Yes, Decision::Unknown | Decision::No) | (Decision::Unknown, Decision::No))
}

/// `w in B_p` on the closed arc `[b_i, b_m]`.
pub(crate) fn bp_closed(c: &ComponentLocal, i: usize, m: usize) -> Decision {
    let mut d = c.right[i].bp.and(c.left[m].bp);
    for cell in i..m {
        d = d.and(c.cell_bp[cell]);
    }
    for x in i + 1..m {
        d = d.and(c.left[x].bp).and(c.right[x].bp);
    }
    d
}

/// The closed arc `[b_i, b_m]` (inner half-points at its ends) lies in `set`.
fn contains_closed(set: &CellSet, i: usize, m: usize) -> bool {
    set.right[i] && set.left[m] && (i..m).all(|c| set.cells[c]) && (i + 1..m).all(|x| set.left[x] && set.right[x])
}

/// Smallest `k1` such that every requirement above it holds, counting
/// unknown answers as failures (`strict`) or as successes.
fn threshold(reqs: &[Decision], strict: bool) -> usize {
    reqs.iter()
        .enumerate()
        .filter(|(_, d)| if strict { **d != Decision::Yes } else { **d == Decision::No })
        .map(|(j, _)| j + 1)
        .max()
        .unwrap_or(0)
}

impl Ctx<'_> {
    fn reg(&self, j: usize) -> Option<&CellSet> {
        self.regs.get(j)
    }

    fn consistency(&mut self, j: usize, i: usize, m: usize, side: Side) -> Decision {
        let key = (j, i, m, side == Side::Plus);
        if let Some(d) = self.memo.get(&key) {
            return *d;
        }
        let d = self.compute_consistency(j, i, m, side);
        self.memo.insert(key, d);
        d
    }

    fn compute_consistency(&self, j: usize, i: usize, m: usize, side: Side) -> Decision {
        let c = &self.ls.comps[j];
        if !(i..m).any(|cell| c.cell_positive[cell]) {
            return Decision::Yes;
        }
        let pts = &self.ls.grid.points;
        let (a, b) = (pts[i], pts[m]);
        let comp = self.mu.component(j);
        if annotated_consistency(comp, a, b, side) == Some(true) {
            return Decision::Yes;
        }
        let w = MeasureComponent { pieces: comp.pieces.clone(), atoms: Vec::new() };
        match muckenhoupt(self.mu.curve(), self.mu.p(), &w, &[&w], Arc::new(a, b), side, DEFAULT_DEPTH) {
            Ok(r) => match r.status {
                LambdaStatus::Finite => Decision::Yes,
                LambdaStatus::Infinite => Decision::No,
                LambdaStatus::Unknown => Decision::Unknown,
            },
            Err(_) => Decision::Unknown,
        }
    }

    /// Some `w_j` with `k1 < j <= k2` is positive right after `b_i`
    /// (`right`) or right before `b_m`.
    fn positive_near(&self, k1: usize, k2: usize, i: usize, m: usize, right: bool) -> bool {
        (k1 + 1..=k2).any(|j| {
            let c = &self.ls.comps[j];
            let cell = if right { i } else { m - 1 };
            let piece = &c.pieces[c.cell_piece[cell]];
            c.cell_positive[cell] && !matches!(piece.form, WeightForm::General { .. })
        })
    }

    /// Side hypothesis of a case for a given `k1` (none when `k1 = 0`).
    fn side_condition(&self, case: u8, variant: Option<&str>, k1: usize, k2: usize, i: usize, m: usize) -> bool {
        if k1 == 0 {
            return true;
        }
        match (case, variant) {
            // b_i^+ in Omega^(k1).
            (3, _) => self.reg(k1).is_some_and(|r| r.right[i]),
            (4, _) => self.reg(k1).is_some_and(|r| r.left[m]),
            (5, Some("5'")) => self.reg(k1 - 1).is_some_and(|r| r.right[i]) && self.positive_near(k1, k2, i, m, true),
            (5, Some(_)) => self.reg(k1 - 1).is_some_and(|r| r.left[m]) && self.positive_near(k1, k2, i, m, false),
            // [b_i, b_m] inside Omega^(k1 - 1).
            _ => self.reg(k1 - 1).is_some_and(|r| contains_closed(r, i, m)),
        }
    }

    fn eval_arc(&mut self, i: usize, m: usize) -> ArcEval {
        let k = self.mu.k();
        let pts = self.ls.grid.points.clone();
        let mk = |k1: usize, k2: usize, case: u8, variant: Option<&str>, decision: Decision| TypeAArc {
            t0: pts[i],
            t1: pts[m],
            k1,
            k2,
            case,
            variant: variant.map(String::from),
            decision,
        };
        let k2 = (1..=k).rev().find(|&j| (i..m).any(|c| self.ls.comps[j].cell_positive[c])).unwrap_or(0);
        if k2 == 0 {
            return ArcEval { arc: Some(mk(0, 0, 1, None, Decision::Yes)), reasons: Vec::new() };
        }
        let mut reasons = Vec::new();
        let bp = bp_closed(&self.ls.comps[k2], i, m);
        if bp == Decision::Yes {
            return ArcEval { arc: Some(mk(0, k2, 2, None, Decision::Yes)), reasons };
        }
        let mut fallback = (bp == Decision::Unknown).then(|| mk(0, k2, 2, None, Decision::Unknown));
        reasons.push(format!("w_{k2} is not known to be in B_p on the closed arc"));

        let right: Vec<Decision> = (1..=k2).map(|j| self.consistency(j, i, m, Side::Plus)).collect();
        let left: Vec<Decision> = (1..=k2).map(|j| self.consistency(j, i, m, Side::Minus)).collect();
        let either: Vec<Decision> = right.iter().zip(&left).map(|(r, l)| r.or(*l)).collect();

        let attempts: [(u8, Option<&str>, &[Decision]); 5] =
            [(3, None, &right), (4, None, &left), (5, None, &either), (5, Some("5'"), &right), (5, Some("5''"), &left)];
        for (case, variant, reqs) in attempts {
            let side = |s: &Self, k1: usize| s.side_condition(case, variant, k1, k2, i, m);
            let k1 = threshold(reqs, true);
            if side(self, k1) {
                return ArcEval { arc: Some(mk(k1, k2, case, variant, Decision::Yes)), reasons };
            }
            let k1_opt = threshold(reqs, false);
            if fallback.is_none() && k1_opt < k1 && side(self, k1_opt) {
                fallback = Some(mk(k1_opt, k2, case, variant, Decision::Unknown));
            }
        }
        let describe = |reqs: &[Decision]| {
            reqs.iter()
                .enumerate()
                .filter(|(_, d)| **d != Decision::Yes)
                .map(|(j, _)| format!("w_{}", j + 1))
                .collect::<Vec<_>>()
                .join(", ")
        };
        reasons.push(format!("not right-consistent: [{}]", describe(&right)));
        reasons.push(format!("not left-consistent: [{}]", describe(&left)));
        reasons.push(String::from("side conditions on the regular sets fail for the remaining k1"));
        ArcEval { arc: fallback, reasons }
    }
}
