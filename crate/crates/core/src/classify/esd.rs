//! Sequential domination `mu_{j+1} <= c mu_j` and the dominated closure
//! `mu_j' = mu_j + ... + mu_k`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measure::{sort_dedup, Atom, MeasureComponent, VectorialMeasure, WeightForm, WeightPiece};
use crate::weight::local::{Decision, LocalStructure};

/// Domination of `mu_{j+1}` by `mu_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsdStep {
    pub j: usize,
    pub dominated: Decision,
    /// Sampled lower estimate of the best constant (`None` when infinite).
    pub constant: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsdReport {
    pub is_esd: Decision,
    /// Largest step constant (`None` when some step is not dominated).
    pub constant: Option<f64>,
    pub steps: Vec<EsdStep>,
    /// Components of the closure `mu_j' = mu_j + ... + mu_k`.
    pub closure: Vec<MeasureComponent>,
}

pub fn esd(mu: &VectorialMeasure) -> Result<EsdReport> {
    let ls = LocalStructure::new(mu, &[]);
    let steps: Vec<EsdStep> = (0..mu.k()).map(|j| step(mu, &ls, j)).collect();
    let is_esd = steps.iter().map(|s| s.dominated).fold(Decision::Yes, Decision::and);
    let constant = if is_esd == Decision::No {
        None
    } else {
        steps.iter().try_fold(0.0f64, |acc, s| s.constant.map(|c| acc.max(c)))
    };
    let closure = closure_components(mu);
    Ok(EsdReport { is_esd, constant, steps, closure })
}

/// The closure as a measure on the same curve.
pub fn esd_closure(mu: &VectorialMeasure) -> Result<VectorialMeasure> {
    let m = VectorialMeasure::new(mu.curve().clone(), mu.p(), closure_components(mu))?;
    Ok(m.with_exact_points(mu.exact_points().map(|(x, r)| (x, r.clone())).collect::<Vec<_>>()))
}

/// Samples clustered geometrically toward both ends of `(a, b)`.
fn samples(a: f64, b: f64) -> Vec<f64> {
    let h = b - a;
    let mut out = Vec::new();
    for m in 1..=40 {
        let s = libm::ldexp(1.0, -m);
        out.push(a + h * s);
        out.push(b - h * s);
    }
    out.extend((1..64).map(|i| a + h * i as f64 / 64.0));
    out.retain(|t| *t > a && *t < b);
    out
}

fn step(mu: &VectorialMeasure, ls: &LocalStructure, j: usize) -> EsdStep {
    let (lo, hi) = (mu.component(j), mu.component(j + 1));
    let mut c: f64 = 0.0;
    for a in &hi.atoms {
        match lo.atoms.iter().find(|b| b.t == a.t) {
            Some(b) => c = c.max(a.mass / b.mass),
            None => {
                return EsdStep {
                    j,
                    dominated: Decision::No,
                    constant: None,
                    reason: format!("atom of mu_{} at t = {} is not an atom of mu_{j}", j + 1, a.t),
                }
            }
        }
    }
    let grid = &ls.grid;
    let (cl, ch) = (&ls.comps[j], &ls.comps[j + 1]);
    let mut unknown: Option<String> = None;
    for cell in 0..grid.cells() {
        if !ch.cell_positive[cell] {
            continue;
        }
        let (a, b) = (grid.points[cell], grid.points[cell + 1]);
        if !cl.cell_positive[cell] {
            return EsdStep {
                j,
                dominated: Decision::No,
                constant: None,
                reason: format!("w_{} is positive on ({a}, {b}) where w_{j} vanishes", j + 1),
            };
        }
        // Near each end the ratio behaves like |t - end|^(e_hi - e_lo).
        for (sl, sh, at) in [(&cl.right[cell], &ch.right[cell], a), (&cl.left[cell + 1], &ch.left[cell + 1], b)] {
            match (sl.exponent, sh.exponent) {
                (Some(el), Some(eh)) if eh < el => {
                    return EsdStep {
                        j,
                        dominated: Decision::No,
                        constant: None,
                        reason: format!("w_{}/w_{j} blows up like |t - {at}|^{} near {at}", j + 1, eh - el),
                    }
                }
                (Some(_), Some(_)) => {}
                _ => {
                    unknown.get_or_insert_with(|| {
                        format!("the ratio w_{}/w_{j} near t = {at} is not determined by the forms", j + 1)
                    });
                }
            }
        }
        let pl = &cl.pieces[cl.cell_piece[cell]];
        let ph = &ch.pieces[ch.cell_piece[cell]];
        for t in samples(a, b) {
            let (wl, wh) = (pl.eval(t), ph.eval(t));
            if wh > 0.0 {
                if wl > 0.0 {
                    c = c.max(wh / wl);
                } else {
                    unknown.get_or_insert_with(|| format!("w_{j} vanishes at t = {t} where w_{} does not", j + 1));
                }
            }
        }
    }
    match unknown {
        Some(reason) => EsdStep { j, dominated: Decision::Unknown, constant: Some(c), reason },
        None => EsdStep {
            j,
            dominated: Decision::Yes,
            constant: Some(c),
            reason: String::from("atoms contained and weight ratio bounded"),
        },
    }
}

fn closure_components(mu: &VectorialMeasure) -> Vec<MeasureComponent> {
    let k = mu.k();
    (0..=k).map(|j| sum_components(&mu.components()[j..])).collect()
}

/// Pointwise sum of components, piece by piece on their common refinement.
fn sum_components(parts: &[MeasureComponent]) -> MeasureComponent {
    let mut atoms: Vec<Atom> = parts.iter().flat_map(|c| c.atoms.iter().copied()).collect();
    atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut merged: Vec<Atom> = Vec::new();
    for a in atoms {
        match merged.last_mut() {
            Some(m) if m.t == a.t => m.mass += a.mass,
            _ => merged.push(a),
        }
    }
    let mut cuts: Vec<f64> = parts.iter().flat_map(|c| c.breakpoints()).collect();
    sort_dedup(&mut cuts);
    let mut pieces: Vec<WeightPiece> = Vec::new();
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        let mut terms: Vec<WeightForm> = Vec::new();
        for c in parts {
            let Some(piece) = c.piece_at(mid) else { continue };
            if piece.is_zero() {
                continue;
            }
            let sub = if piece.arc.t0 == u && piece.arc.t1 == v { piece.clone() } else { piece.sub_piece(u, v) };
            match sub.form {
                WeightForm::Sum { terms: inner } => terms.extend(inner),
                f => add_term(&mut terms, f),
            }
        }
        let form = match terms.len() {
            0 => WeightForm::Zero,
            1 => terms.pop().unwrap(),
            _ => WeightForm::Sum { terms },
        };
        let piece = WeightPiece::new(u, v, form);
        match pieces.last_mut() {
            Some(last) if last.is_zero() && piece.is_zero() => last.arc.t1 = v,
            _ => pieces.push(piece),
        }
    }
    MeasureComponent::new(pieces, merged)
}

/// Adds a term, merging power weights that differ only in their constant.
fn add_term(terms: &mut Vec<WeightForm>, f: WeightForm) {
    if let WeightForm::Power { c, alpha_left, alpha_right, anchor_left, anchor_right, smooth } = &f {
        for t in terms.iter_mut() {
            if let WeightForm::Power {
                c: c2,
                alpha_left: l2,
                alpha_right: r2,
                anchor_left: al2,
                anchor_right: ar2,
                smooth: s2,
            } = t
            {
                if l2 == alpha_left && r2 == alpha_right && al2 == anchor_left && ar2 == anchor_right && s2 == smooth {
                    *c2 += c;
                    return;
                }
            }
        }
    }
    terms.push(f);
}
