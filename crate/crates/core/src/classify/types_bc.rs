//! Types B and C, read off the structural annotations of the weights.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::measure::{VectorialMeasure, WeightForm};
use crate::weight::admissible::{admissibility_on, AdmissibilityReport};
use crate::weight::local::{exponent_is_bp, Decision, LocalStructure, SideInfo};
use crate::weight::omega::omega_cells;

/// Why one piece of `w_j` is comparable to a piecewise monotone function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeBPiece {
    pub j: usize,
    pub t0: f64,
    pub t1: f64,
    pub decision: Decision,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeBReport {
    pub is_type_b: Decision,
    pub strongly_admissible: Decision,
    pub pieces: Vec<TypeBPiece>,
    /// Every `mu_j`, `j >= 1`, is absolutely continuous with comparable-to-
    /// piecewise-monotone density; boundedness then needs no admissibility
    /// check at all.
    pub absolutely_continuous: bool,
    pub failures: Vec<String>,
}

fn form_evidence(form: &WeightForm) -> (Decision, String) {
    match form {
        WeightForm::Zero => (Decision::Yes, String::from("zero")),
        WeightForm::Power { .. } => {
            (Decision::Yes, String::from("power weight, monotone up to constants on each half"))
        }
        WeightForm::Monotone { comparable: false, .. } => (Decision::Yes, String::from("monotone")),
        WeightForm::Monotone { comparable: true, .. } => {
            (Decision::Yes, String::from("comparable to a monotone function"))
        }
        WeightForm::General { .. } => {
            (Decision::Unknown, String::from("general weight without a monotonicity annotation"))
        }
        WeightForm::Sum { terms } => {
            // A sum is comparable to the maximum of its terms, and a maximum of
            // finitely many piecewise monotone functions is piecewise monotone.
            let d = terms.iter().map(|f| form_evidence(f).0).fold(Decision::Yes, Decision::and);
            (d, String::from("sum of annotated terms, comparable to their maximum"))
        }
    }
}

pub fn classify_type_b(mu: &VectorialMeasure) -> TypeBReport {
    let ls = LocalStructure::new(mu, &[]);
    let adm = admissibility_on(&ls, mu);
    type_b_on(mu, &adm)
}

pub(crate) fn type_b_on(mu: &VectorialMeasure, adm: &AdmissibilityReport) -> TypeBReport {
    let mut pieces = Vec::new();
    let mut failures = Vec::new();
    let mut shape = Decision::Yes;
    for j in 1..=mu.k() {
        for piece in &mu.component(j).pieces {
            let (d, evidence) = form_evidence(&piece.form);
            if d != Decision::Yes {
                failures.push(format!("w_{j} on [{}, {}]: {evidence}", piece.arc.t0, piece.arc.t1));
            }
            shape = shape.and(d);
            pieces.push(TypeBPiece { j, t0: piece.arc.t0, t1: piece.arc.t1, decision: d, evidence });
        }
    }
    let atoms_free = (1..=mu.k()).all(|j| mu.component(j).atoms.is_empty());
    if adm.strongly_admissible != Decision::Yes {
        failures.push(String::from("the measure is not known to be strongly p-admissible"));
    }
    TypeBReport {
        is_type_b: shape.and(adm.strongly_admissible),
        strongly_admissible: adm.strongly_admissible,
        pieces,
        absolutely_continuous: atoms_free && shape == Decision::Yes,
        failures,
    }
}

/// Which endpoint case holds for `w_j`: `"2.1"` to `"2.4"` at the start of
/// the curve, `"3.1"` to `"3.4"` at its end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndCase {
    pub j: usize,
    pub label: Option<String>,
    /// Algebraic exponent of `w_j` at the endpoint, when known.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCReport {
    pub is_type_c: Decision,
    pub strongly_admissible: Decision,
    /// `a_1 < a_2 < a_3 < a_4`.
    pub points: Vec<f64>,
    /// `w_k in B_p((a_1, a_4))`.
    pub top_bp: Decision,
    pub start: Vec<EndCase>,
    pub end: Vec<EndCase>,
    pub failures: Vec<String>,
}

pub fn classify_type_c(mu: &VectorialMeasure) -> TypeCReport {
    let ls = LocalStructure::new(mu, &[]);
    let adm = admissibility_on(&ls, mu);
    type_c_on(mu, &ls, &adm)
}

/// Endpoint case of one weight from its side information and the form of
/// the piece at the endpoint.
fn end_case(side: &SideInfo, form: &WeightForm, cell_bp: Decision, p: f64, prefix: u8) -> (Decision, Option<String>) {
    let label = |x: u8| Some(format!("{prefix}.{x}"));
    if side.zero {
        return (Decision::Yes, label(1));
    }
    let annotated = !matches!(form, WeightForm::General { .. } | WeightForm::Sum { .. });
    if let (Some(e), true) = (side.exponent, matches!(form, WeightForm::Power { .. } | WeightForm::Sum { .. })) {
        // w ~ |z - a|^e near the endpoint.
        return if exponent_is_bp(e, p) {
            (Decision::Yes, label(2))
        } else if e == p - 1.0 {
            (Decision::Yes, label(3))
        } else {
            (Decision::Yes, label(4))
        };
    }
    if annotated {
        return (Decision::Yes, label(1));
    }
    let bp = side.bp.and(cell_bp);
    if bp == Decision::Yes || side.lower_exponent.is_some_and(|d| d < p - 1.0) {
        return (Decision::Yes, label(2));
    }
    (Decision::Unknown, None)
}

pub(crate) fn type_c_on(mu: &VectorialMeasure, ls: &LocalStructure, adm: &AdmissibilityReport) -> TypeCReport {
    let grid = &ls.grid;
    let n = grid.cells();
    let l = grid.length;
    let pts = &grid.points;
    let a2 = 0.25 * pts[1];
    let a3 = l - 0.25 * (l - pts[n - 1]);
    let mut report = TypeCReport {
        is_type_c: Decision::No,
        strongly_admissible: adm.strongly_admissible,
        points: alloc::vec![0.0, a2, a3, l],
        top_bp: Decision::No,
        start: Vec::new(),
        end: Vec::new(),
        failures: Vec::new(),
    };
    if mu.curve().is_closed() {
        report.failures.push(String::from("type C needs an arc with two distinct endpoints"));
        return report;
    }
    let k = mu.k();
    let (omega_k, inexact) = omega_cells(ls, k);
    let open_arc = (0..n).all(|c| omega_k.cells[c]) && (1..n).all(|x| omega_k.left[x] && omega_k.right[x]);
    report.top_bp = if open_arc {
        Decision::Yes
    } else if inexact {
        Decision::Unknown
    } else {
        Decision::No
    };
    if report.top_bp != Decision::Yes {
        report.failures.push(format!("w_{k} is not known to be in B_p on the open curve"));
    }
    let mut ends = Decision::Yes;
    for j in 1..=k {
        let c = &ls.comps[j];
        let first = &c.pieces[c.cell_piece[0]];
        let last = &c.pieces[c.cell_piece[n - 1]];
        let (d0, l0) = end_case(&c.right[0], &first.form, c.cell_bp[0], ls.p, 2);
        let (d1, l1) = end_case(&c.left[n], &last.form, c.cell_bp[n - 1], ls.p, 3);
        if d0 != Decision::Yes {
            report.failures.push(format!("no endpoint case (2.x) is certified for w_{j}"));
        }
        if d1 != Decision::Yes {
            report.failures.push(format!("no endpoint case (3.x) is certified for w_{j}"));
        }
        ends = ends.and(d0).and(d1);
        report.start.push(EndCase { j, label: l0, exponent: c.right[0].exponent });
        report.end.push(EndCase { j, label: l1, exponent: c.left[n].exponent });
    }
    if adm.strongly_admissible != Decision::Yes {
        report.failures.push(String::from("the measure is not known to be strongly p-admissible"));
    }
    report.is_type_c = report.top_bp.and(ends).and(adm.strongly_admissible);
    report
}
