//! Decomposition `mu_j = w_j ds|_{Omega_j} + mu_j^*`, admissibility,
//! consistency of weights and verification of completion candidates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::local::{Decision, LocalStructure};
use super::muckenhoupt::{muckenhoupt, LambdaStatus, MuckenhouptReport, Side, DEFAULT_DEPTH};
use super::omega::{omega_cells, regular_cells};
use super::sets::CellSet;
use crate::curve::Arc;
use crate::error::{Error, Result};
use crate::measure::{Atom, MeasureComponent, VectorialMeasure, WeightForm};

/// `mu_j` split into its part on `Omega_j` and the singular remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub j: usize,
    /// Mass of `w_j ds` restricted to `Omega_j`.
    pub ac_on_omega: f64,
    pub star_atoms: Vec<Atom>,
    /// Absolutely continuous mass outside `Omega_j`, per grid cell.
    pub star_ac: Vec<StarCell>,
    pub star_mass: f64,
    pub total_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarCell {
    pub t0: f64,
    pub t1: f64,
    pub mass: f64,
}

fn cell_mass(ls: &LocalStructure, comp: &MeasureComponent, j: usize, cell: usize) -> f64 {
    if !ls.comps[j].cell_positive[cell] {
        return 0.0;
    }
    comp.ac_mass_between(ls.grid.points[cell], ls.grid.points[cell + 1])
}

pub(crate) fn decompose_on(ls: &LocalStructure, mu: &VectorialMeasure, j: usize) -> Decomposition {
    let (omega, _) = omega_cells(ls, j);
    let comp = mu.component(j);
    let mut ac_on_omega = 0.0;
    let mut star_ac = Vec::new();
    for cell in 0..ls.grid.cells() {
        let m = cell_mass(ls, comp, j, cell);
        if omega.cells[cell] {
            ac_on_omega += m;
        } else if m > 0.0 {
            star_ac.push(StarCell { t0: ls.grid.points[cell], t1: ls.grid.points[cell + 1], mass: m });
        }
    }
    let star_atoms = comp.atoms.clone();
    let star_mass = star_ac.iter().map(|c| c.mass).sum::<f64>() + comp.atom_mass();
    Decomposition { j, ac_on_omega, star_atoms, star_ac, star_mass, total_mass: comp.total_mass() }
}

/// Splits `mu_j` into `w_j ds` on `Omega_j` and `mu_j^*`.
pub fn decompose(mu: &VectorialMeasure, j: usize) -> Result<Decomposition> {
    if j > mu.k() {
        return Err(Error::InvalidArgument(format!("component {j} does not exist")));
    }
    let ls = LocalStructure::new(mu, &[]);
    Ok(decompose_on(&ls, mu, j))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub j: usize,
    /// Where the offending mass sits.
    pub t0: f64,
    pub t1: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: Decision,
    pub strongly_admissible: Decision,
    pub violations: Vec<Violation>,
    pub strong_violations: Vec<Violation>,
    /// Some set involved was only approximated from inside.
    pub inexact: bool,
}

/// Checks `mu_j^*(gamma \ Omega^(j)) = 0` for `1 <= j < k`, `mu_k^* = 0`
/// (when `k >= 1`), and the strong condition that inside every component
/// `Lambda` of `Omega^(j)` the support of `mu_j^*` stays inside `Lambda`.
///
/// An atom at an interior point counts as inside `Omega^(j)` only when both
/// of its half-points are regular.
pub fn admissibility(mu: &VectorialMeasure) -> AdmissibilityReport {
    let ls = LocalStructure::new(mu, &[]);
    admissibility_on(&ls, mu)
}

pub(crate) fn admissibility_on(ls: &LocalStructure, mu: &VectorialMeasure) -> AdmissibilityReport {
    let k = mu.k();
    let grid = &ls.grid;
    let mut violations = Vec::new();
    let mut strong = Vec::new();
    let mut inexact = false;
    if k >= 1 {
        for j in 1..=k {
            let d = decompose_on(ls, mu, j);
            let (_, om_inexact) = omega_cells(ls, j);
            inexact |= om_inexact;
            if j == k {
                for a in &d.star_atoms {
                    violations.push(Violation {
                        j,
                        t0: a.t,
                        t1: a.t,
                        reason: format!("atom of mu_{k} (mu_k^* must vanish)"),
                    });
                }
                for c in &d.star_ac {
                    violations.push(Violation {
                        j,
                        t0: c.t0,
                        t1: c.t1,
                        reason: format!("mass of w_{k} outside Omega_{k} (mu_k^* must vanish)"),
                    });
                }
                continue;
            }
            let (reg, reg_inexact) = regular_cells(ls, j);
            inexact |= reg_inexact;
            for a in &d.star_atoms {
                if !reg.contains(grid, a.t) {
                    violations.push(Violation {
                        j,
                        t0: a.t,
                        t1: a.t,
                        reason: format!("atom of mu_{j} outside Omega^({j})"),
                    });
                }
            }
            for c in &d.star_ac {
                let cell = grid.cell_of(0.5 * (c.t0 + c.t1));
                if !reg.cells[cell] {
                    violations.push(Violation {
                        j,
                        t0: c.t0,
                        t1: c.t1,
                        reason: format!("mass of w_{j} outside Omega_{j} and outside Omega^({j})"),
                    });
                }
            }
            strong.extend(strong_violations(ls, &reg, &d, j));
        }
    }
    let decide = |v: &[Violation]| {
        if v.is_empty() {
            Decision::Yes
        } else if inexact {
            Decision::Unknown
        } else {
            Decision::No
        }
    };
    let admissible = decide(&violations);
    let strongly = match admissible {
        Decision::Yes => decide(&strong),
        other => other,
    };
    AdmissibilityReport { admissible, strongly_admissible: strongly, violations, strong_violations: strong, inexact }
}

fn strong_violations(ls: &LocalStructure, reg: &CellSet, d: &Decomposition, j: usize) -> Vec<Violation> {
    let grid = &ls.grid;
    let mut out = Vec::new();
    for run in reg.runs(grid) {
        let arc = run.arc;
        for c in &d.star_ac {
            let cell = grid.cell_of(0.5 * (c.t0 + c.t1));
            if !run.cells.contains(&cell) {
                continue;
            }
            let touches_open_start = !arc.full && c.t0 == arc.t0 && !arc.start_closed;
            let touches_open_end = !arc.full && c.t1 == arc.t1 && !arc.end_closed;
            if touches_open_start || touches_open_end {
                out.push(Violation {
                    j,
                    t0: c.t0,
                    t1: c.t1,
                    reason: format!("support of mu_{j}^* reaches the boundary of a component of Omega^({j})"),
                });
            }
        }
    }
    out
}

/// Answer of the consistency test of one weight on an arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub side: Side,
    pub consistent: Decision,
    pub reason: String,
    /// `Lambda^side(w, w)` on the arc, when computed.
    pub lambda: Option<MuckenhouptReport>,
}

/// Annotation-based answer: `Some(true)` when the weight on the arc is
/// comparable to a monotone function of the matching direction (or zero).
pub(crate) fn annotated_consistency(comp: &MeasureComponent, t0: f64, t1: f64, side: Side) -> Option<bool> {
    if comp.pieces.is_empty() {
        return Some(true);
    }
    let mid = 0.5 * (t0 + t1);
    let piece = comp.piece_at(mid)?;
    if piece.arc.t0 > t0 || piece.arc.t1 < t1 {
        return None;
    }
    // Right-consistency (plus side) follows from a nondecreasing profile.
    let nondecreasing = |up: bool| Some(if side == Side::Plus { up } else { !up });
    match &piece.form {
        WeightForm::Zero => Some(true),
        WeightForm::Power { alpha_left, alpha_right, anchor_left, anchor_right, .. } => {
            let pm = 0.5 * (piece.arc.t0 + piece.arc.t1);
            let al = if anchor_left.is_some() { 0.0 } else { *alpha_left };
            let ar = if anchor_right.is_some() { 0.0 } else { *alpha_right };
            if t1 <= pm {
                if al == 0.0 {
                    Some(true)
                } else {
                    nondecreasing(al > 0.0)
                }
            } else if t0 >= pm {
                if ar == 0.0 {
                    Some(true)
                } else {
                    nondecreasing(ar < 0.0)
                }
            } else if al == 0.0 && ar == 0.0 {
                Some(true)
            } else {
                None
            }
        }
        WeightForm::Monotone { direction, .. } => nondecreasing(*direction == crate::measure::Direction::Nondecreasing),
        WeightForm::General { .. } => None,
        WeightForm::Sum { terms } => {
            // A sum of comparable-to-monotone weights of one direction keeps it.
            let all = terms.iter().all(|f| {
                let single = MeasureComponent::new(
                    alloc::vec![crate::measure::WeightPiece { arc: piece.arc, form: f.clone() }],
                    Vec::new(),
                );
                annotated_consistency(&single, t0, t1, side) == Some(true)
            });
            all.then_some(true)
        }
    }
}

/// Whether `w_j` is right- (`Plus`) or left- (`Minus`) consistent on `arc`,
/// i.e. `Lambda^side(w_j, w_j) < inf`.
pub fn consistency(mu: &VectorialMeasure, j: usize, arc: Arc, side: Side) -> Result<ConsistencyReport> {
    if j > mu.k() {
        return Err(Error::InvalidArgument(format!("component {j} does not exist")));
    }
    let comp = mu.component(j);
    let w = MeasureComponent { pieces: comp.pieces.clone(), atoms: Vec::new() };
    let lambda = muckenhoupt(mu.curve(), mu.p(), &w, &[&w], arc, side, DEFAULT_DEPTH)?;
    let annotated = annotated_consistency(comp, arc.t0, arc.t1, side);
    let (consistent, reason) = match annotated {
        Some(true) => {
            (Decision::Yes, String::from("weight is comparable to a monotone function of the matching direction"))
        }
        _ => match lambda.status {
            LambdaStatus::Finite => {
                (Decision::Yes, String::from("Muckenhoupt constant of the weight against itself is finite"))
            }
            LambdaStatus::Infinite => (Decision::No, lambda.certificate.clone()),
            LambdaStatus::Unknown => (Decision::Unknown, lambda.certificate.clone()),
        },
    };
    Ok(ConsistencyReport { side, consistent, reason, lambda: Some(lambda) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionStep {
    pub j: usize,
    /// Mass of the candidate addition on the arc.
    pub added_mass: f64,
    pub lambda: MuckenhouptReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub valid: Decision,
    pub steps: Vec<CompletionStep>,
}

/// Verifies a completion candidate `(tilde mu_0, ..., tilde mu_{k-1})` on
/// `arc`: going down from `j = k - 1`, with `bar mu_k = mu_k` and
/// `bar mu_j = mu_j + tilde mu_j`, each `Lambda^side(tilde mu_j, bar mu_{j+1})`
/// must be finite. Missing entries count as zero.
pub fn verify_completion(
    mu: &VectorialMeasure,
    tilde: &[MeasureComponent],
    arc: Arc,
    side: Side,
) -> Result<CompletionReport> {
    let k = mu.k();
    if tilde.len() > k {
        return Err(Error::InvalidArgument(format!("a completion has at most k = {k} components")));
    }
    let empty = MeasureComponent::default();
    let tilde_at = |j: usize| tilde.get(j).unwrap_or(&empty);
    let mut steps = Vec::new();
    let mut valid = Decision::Yes;
    for j in (0..k).rev() {
        let add = tilde_at(j);
        let lo = arc.t0.min(arc.t1);
        let hi = arc.t0.max(arc.t1);
        let added_mass = add.ac_mass_between(lo, hi)
            + add.atoms.iter().filter(|a| a.t >= lo && a.t <= hi).map(|a| a.mass).sum::<f64>();
        let upper = tilde_at(j + 1);
        let nu: Vec<&MeasureComponent> =
            if j + 1 < k { alloc::vec![mu.component(j + 1), upper] } else { alloc::vec![mu.component(j + 1)] };
        let lambda = muckenhoupt(mu.curve(), mu.p(), add, &nu, arc, side, DEFAULT_DEPTH)?;
        let d = match lambda.status {
            LambdaStatus::Finite => Decision::Yes,
            LambdaStatus::Infinite => Decision::No,
            LambdaStatus::Unknown => Decision::Unknown,
        };
        valid = valid.and(d);
        steps.push(CompletionStep { j, added_mass, lambda });
    }
    Ok(CompletionReport { valid, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;
    use crate::measure::WeightPiece;
    use alloc::vec;
    use num_complex::Complex64;

    fn unit() -> Curve {
        Curve::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn decomposition_conserves_mass() {
        let c1 = MeasureComponent::new(
            vec![
                WeightPiece::power(0.0, 0.5, 2.0, 0.0, 3.0),
                WeightPiece::zero(0.5, 0.75),
                WeightPiece::constant(0.75, 1.0, 1.0),
            ],
            vec![Atom { t: 0.6, mass: 0.5 }],
        );
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), c1]).unwrap();
        let d = decompose(&mu, 1).unwrap();
        assert!((d.ac_on_omega + d.star_mass - d.total_mass).abs() < 1e-12 * d.total_mass);
        assert_eq!(d.star_atoms.len(), 1);
        assert!(d.star_ac.is_empty());
    }

    #[test]
    fn atoms_of_top_component_break_admissibility() {
        let c1 = MeasureComponent::new(vec![WeightPiece::constant(0.0, 1.0, 1.0)], vec![Atom { t: 0.5, mass: 1.0 }]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), c1]).unwrap();
        let r = admissibility(&mu);
        assert_eq!(r.admissible, Decision::No);
        assert_eq!(r.violations.len(), 1);
        // mu_0 atoms are never restricted.
        let c0 = MeasureComponent::atoms_only(vec![Atom { t: 0.0, mass: 1.0 }, Atom { t: 0.3, mass: 1.0 }]);
        let c1 = MeasureComponent::lebesgue(1.0, 1.0);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![c0.clone(), c1]).unwrap();
        assert_eq!(admissibility(&mu).strongly_admissible, Decision::Yes);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![c0]).unwrap();
        assert_eq!(admissibility(&mu).admissible, Decision::Yes);
    }

    #[test]
    fn middle_atoms_need_regular_points() {
        // k = 2: w_2 = x^4 on [0,1]. Omega^(1) excludes 0 (4 < 2p-1 = 3 fails),
        // so an atom of mu_1 at 0 is not allowed; at 0.5 it is.
        let c2 = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 4.0, 0.0)], vec![]);
        let bad = MeasureComponent::atoms_only(vec![Atom { t: 0.0, mass: 1.0 }]);
        let good = MeasureComponent::atoms_only(vec![Atom { t: 0.5, mass: 1.0 }]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), bad, c2.clone()]).unwrap();
        assert_eq!(admissibility(&mu).admissible, Decision::No);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), good, c2]).unwrap();
        assert_eq!(admissibility(&mu).admissible, Decision::Yes);
    }

    #[test]
    fn consistency_of_powers() {
        let c = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![c]).unwrap();
        let r = consistency(&mu, 0, Arc::new(0.0, 1.0), Side::Plus).unwrap();
        assert_eq!(r.consistent, Decision::Yes);
        let lambda = r.lambda.unwrap().value;
        // Bound from comparison with |z|^{alpha - p}: (1/(alpha-p+1)) ((p-1)/(alpha-p+1))^{p-1} = 1/4.
        assert!(lambda <= 0.25 && (lambda - 1.0 / 32.0).abs() < 1e-5);
        // Against the direction: Lambda^-(x^3, x^3) on [0,1] is infinite.
        let r = consistency(&mu, 0, Arc::new(0.0, 1.0), Side::Minus).unwrap();
        assert_eq!(r.consistent, Decision::No);
    }

    #[test]
    fn completion_candidates() {
        let cube = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.0)], vec![]);
        let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), cube]).unwrap();
        let endpoint = MeasureComponent::atoms_only(vec![Atom { t: 0.0, mass: 1.0 }]);
        let r = verify_completion(&mu, &[endpoint], Arc::new(0.0, 1.0), Side::Plus).unwrap();
        assert_eq!(r.valid, Decision::Yes);
        let r =
            verify_completion(&mu, &[MeasureComponent::lebesgue(1.0, 1.0)], Arc::new(0.0, 1.0), Side::Plus).unwrap();
        assert_eq!(r.valid, Decision::No);
        let r = verify_completion(&mu, &[], Arc::new(0.0, 1.0), Side::Plus).unwrap();
        assert_eq!(r.valid, Decision::Yes);
    }
}
