use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::*;
use crate::curve::Curve;
use crate::families::{dyadic_counterexample, Tail};
use crate::measure::{Atom, MeasureComponent, WeightPiece};
use crate::weight::local::Decision;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(delta_0, 0, chi_[-1,0] dx, chi_[0,1] dx)` on `[-1, 1]`, with extra
/// atoms of `mu_0` at the given points.
fn steps(extra: &[f64]) -> VectorialMeasure {
    let curve = Curve::segment(c(-1.0), c(1.0)).unwrap();
    let mut atoms = vec![Atom { t: 1.0, mass: 1.0 }];
    atoms.extend(extra.iter().map(|x| Atom { t: x + 1.0, mass: 1.0 }));
    let comps = vec![
        MeasureComponent::atoms_only(atoms),
        MeasureComponent::default(),
        MeasureComponent::new(vec![WeightPiece::constant(0.0, 1.0, 1.0), WeightPiece::zero(1.0, 2.0)], vec![]),
        MeasureComponent::new(vec![WeightPiece::zero(0.0, 1.0), WeightPiece::constant(1.0, 2.0, 1.0)], vec![]),
    ];
    VectorialMeasure::new(curve, 2.0, comps).unwrap()
}

fn samples_of(basis: &[PiecewisePolynomial], mu: &VectorialMeasure, pts: &[f64]) -> Vec<Vec<Complex64>> {
    basis.iter().map(|g| pts.iter().map(|t| g.eval(mu.curve(), *t, 0)).collect()).collect()
}

#[test]
fn step_example_kernel_is_x_and_x_plus_squared() {
    let mu = steps(&[]);
    let (sys, k) = compute_kernel(&mu, None).unwrap();
    let comps = &sys.decomposition.components;
    assert_eq!(comps.len(), 2);
    assert_eq!((comps[0].j_upper, comps[0].j_lower), (2, 2));
    assert_eq!((comps[1].j_upper, comps[1].j_lower), (3, 3));
    assert_eq!(sys.columns, 5);
    assert_eq!(sys.decomposition.pasting.len(), 1);
    assert_eq!(sys.decomposition.pasting[0].orders, 2);
    assert_eq!(k.dim, 2);
    assert!(!k.low_confidence);
    let pts: Vec<f64> = (0..12).map(|i| 0.05 + 0.16 * i as f64).collect();
    let reference: Vec<Vec<Complex64>> = vec![
        pts.iter().map(|t| c(t - 1.0)).collect(),
        pts.iter().map(|t| c(if *t > 1.0 { (t - 1.0) * (t - 1.0) } else { 0.0 })).collect(),
    ];
    assert!(mutual_projection_residual(&samples_of(&k.basis, &mu, &pts), &reference) < 1e-8);
    assert!(k.residual < 1e-8);
}

#[test]
fn two_more_atoms_kill_the_kernel() {
    let mu = steps(&[-0.5, 0.5]);
    let (_, k) = compute_kernel(&mu, None).unwrap();
    assert_eq!(k.dim, 0);
}

#[test]
fn one_atom_is_enough_for_constants() {
    let curve = Curve::segment(c(0.0), c(1.0)).unwrap();
    let mu = VectorialMeasure::new(
        curve,
        2.0,
        vec![MeasureComponent::atoms_only(vec![Atom { t: 0.5, mass: 1.0 }]), MeasureComponent::lebesgue(1.0, 1.0)],
    )
    .unwrap();
    let (sys, k) = compute_kernel(&mu, None).unwrap();
    assert_eq!(sys.decomposition.components.len(), 1);
    assert_eq!(sys.decomposition.components[0].j_upper, 1);
    assert_eq!(sys.decomposition.components[0].j_lower, 0);
    assert_eq!(k.dim, 0);
}

#[test]
fn nothing_to_decompose_without_higher_weights() {
    let curve = Curve::segment(c(0.0), c(1.0)).unwrap();
    let mu = VectorialMeasure::new(curve, 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), MeasureComponent::default()])
        .unwrap();
    let dec = decompose_components(&mu, None).unwrap();
    assert!(dec.components.is_empty());
}

#[test]
fn dyadic_family_on_the_first_compact() {
    let mu = dyadic_counterexample(2, 2.0, Tail::Open).unwrap();
    let region = Region::compact(&[(1.0 / 16.0, 1.0)]);
    let (sys, k) = compute_kernel(&mu, Some(&region)).unwrap();
    assert!(k.dim >= 1);
    // Constraints: f(1/8) = 0, f'(3/16) = 0, f(1/2) = 0, f'(3/4) = 0, pasting at 1/4.
    let atoms: Vec<(f64, usize)> = sys.decomposition.atoms.iter().map(|a| (a.t, a.order)).collect();
    for want in [(0.125, 0), (0.1875, 1), (0.5, 0), (0.75, 1)] {
        assert!(atoms.contains(&want), "{want:?} missing from {atoms:?}");
    }
    assert!(sys.decomposition.pasting.iter().any(|p| p.t == 0.25 && p.orders == 1));
    let pts: Vec<f64> = (0..20).map(|i| 0.07 + 0.046 * i as f64).collect();
    let g1: Vec<Complex64> = pts.iter().map(|x| c(if *x <= 0.25 { (x - 0.25) * (x - 0.125) } else { 0.0 })).collect();
    // g1 must lie in the span: project it onto the basis samples.
    let basis = samples_of(&k.basis, &mu, &pts);
    let rel = projection_residual(&basis, &g1);
    assert!(rel < 1e-8, "g1 residual {rel}");
}

#[test]
fn dyadic_family_with_all_constraints_has_trivial_kernel() {
    for d in 1..=4 {
        let mu = dyadic_counterexample(d, 2.0, Tail::Closed).unwrap();
        let (sys, k) = compute_kernel(&mu, None).unwrap();
        assert_eq!(k.dim, 0, "depth {d}");
        assert_eq!(sys.decomposition.components.len(), d + 1);
        assert!(sys.decomposition.components.iter().all(|c| c.j_lower == 3));
        let open = dyadic_counterexample(d, 2.0, Tail::Open).unwrap();
        assert_eq!(compute_kernel(&open, None).unwrap().1.dim, 1);
    }
}

#[test]
fn exact_and_float_solvers_agree() {
    for mu in [steps(&[]), steps(&[-0.5]), steps(&[-0.5, 0.5]), dyadic_counterexample(2, 2.0, Tail::Open).unwrap()] {
        let (sys, k) = compute_kernel(&mu, None).unwrap();
        let ex = solve_exact(&mu, &sys).unwrap();
        assert_eq!(ex.dim, k.dim);
        assert!(compare_with_float(&mu, &sys, &k.basis, &ex) < 1e-8);
    }
}

#[test]
fn exact_solver_rejects_circles() {
    let curve = Curve::full_circle(c(0.0), 1.0).unwrap();
    let l = curve.length();
    let mu = VectorialMeasure::new(curve, 2.0, vec![MeasureComponent::default(), MeasureComponent::lebesgue(l, 1.0)])
        .unwrap();
    let (sys, k) = compute_kernel(&mu, None).unwrap();
    assert_eq!(k.dim, 1);
    assert!(solve_exact(&mu, &sys).is_err());
}

#[test]
fn closed_curve_pastes_through_the_seam() {
    // w_2 vanishes to order 2 at the seam: 0-regular there, not 1-regular.
    let curve = Curve::full_circle(c(0.0), 1.0).unwrap();
    let l = curve.length();
    let w2 = MeasureComponent::new(vec![WeightPiece::power(0.0, l, 1.0, 2.0, 2.0)], vec![]);
    let mu =
        VectorialMeasure::new(curve, 2.0, vec![MeasureComponent::default(), MeasureComponent::default(), w2]).unwrap();
    let (sys, k) = compute_kernel(&mu, None).unwrap();
    assert_eq!(sys.decomposition.components.len(), 1);
    let ps = &sys.decomposition.pasting;
    assert_eq!(ps.len(), 1);
    assert_eq!((ps[0].left, ps[0].right, ps[0].orders), (0, 0, 1));
    // Continuity of one polynomial is automatic: a + b z survives.
    assert_eq!(k.dim, 2);
    // An atom of mu_0 at the seam removes one dimension.
    let mu2 = mu.with_atom(0, Atom { t: 0.0, mass: 1.0 }).unwrap();
    assert_eq!(compute_kernel(&mu2, None).unwrap().1.dim, 1);
}

#[test]
fn kernel_elements_follow_component_degrees() {
    let mu = steps(&[]);
    let (sys, k) = compute_kernel(&mu, None).unwrap();
    for g in &k.basis {
        for (piece, comp) in g.pieces.iter().zip(&sys.decomposition.components) {
            assert!(piece.coeffs.len() <= comp.j_upper);
        }
    }
}

#[test]
fn c0_decisions() {
    let mu = steps(&[]);
    let r = check_c0(&mu, C0Options::default()).unwrap();
    assert_eq!(r.in_c0, Decision::No);
    assert_eq!(r.justification, C0Justification::FiniteComponentsRemark);

    let curve = Curve::segment(c(-1.0), c(1.0)).unwrap();
    let k1 = VectorialMeasure::new(
        curve,
        2.0,
        vec![MeasureComponent::atoms_only(vec![Atom { t: 1.0, mass: 1.0 }]), MeasureComponent::lebesgue(2.0, 1.0)],
    )
    .unwrap();
    let r = check_c0(&k1, C0Options::default()).unwrap();
    assert_eq!((r.in_c0, r.justification), (Decision::Yes, C0Justification::TheoremCc03));
    assert!(r.witness_verified && !r.witness.is_empty());

    let fam = dyadic_counterexample(3, 2.0, Tail::Closed).unwrap();
    let r = check_c0(&fam, C0Options { truncated_family: true }).unwrap();
    assert_eq!((r.in_c0, r.justification), (Decision::Unknown, C0Justification::NotCovered));
}
