//! Invariants of the set, kernel, verdict and numerics layers on random
//! piecewise measures over `[0, 1]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use sobolev_curves::classify::boundedness_verdict;
use sobolev_curves::kernel::compute_kernel;
use sobolev_curves::measure::{Direction, Region};
use sobolev_curves::numerics::{gram_matrix, multiplication_matrix, orthonormal_basis};
use sobolev_curves::weight::muckenhoupt::{muckenhoupt, Side};
use sobolev_curves::weight::omega::{bp_membership, compute_omega, regular_sets};
use sobolev_curves::weight::Decision;
use sobolev_curves::{Arc, Atom, Curve, MeasureComponent, Profile, VectorialMeasure, WeightForm, WeightPiece};

const ALPHAS: [f64; 6] = [-0.5, 0.0, 0.5, 1.0, 2.0, 0.0];

fn unit() -> Curve {
    Curve::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
}

/// Piece table entry: kind 0 is zero, 1 monotone, otherwise a power weight
/// with exponents indexed into `ALPHAS`.
type Cell = (u8, usize, usize);

fn piece(cell: Cell, a: f64, b: f64) -> WeightPiece {
    let (kind, l, r) = cell;
    match kind {
        0 => WeightPiece::zero(a, b),
        1 => WeightPiece::new(
            a,
            b,
            WeightForm::Monotone {
                evaluator: Profile::Polynomial { coeffs: vec![1.0 - a, 1.0] },
                direction: Direction::Nondecreasing,
                comparable: false,
            },
        ),
        _ => WeightPiece::power(a, b, 1.0, ALPHAS[l], ALPHAS[r]),
    }
}

fn component(cells: &[Cell]) -> MeasureComponent {
    let h = 1.0 / cells.len() as f64;
    MeasureComponent::new(
        cells.iter().enumerate().map(|(i, c)| piece(*c, i as f64 * h, (i + 1) as f64 * h)).collect(),
        vec![],
    )
}

fn cells() -> impl Strategy<Value = Vec<Cell>> {
    prop::collection::vec((0u8..4, 0usize..ALPHAS.len(), 0usize..ALPHAS.len()), 4)
}

/// Atoms of `mu_0` on the grid `i / 16`.
fn atoms() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::btree_set(0u8..=16, 0..5).prop_map(|s| s.into_iter().collect())
}

fn build(mu0_lebesgue: bool, atoms: &[u8], tops: &[Vec<Cell>]) -> VectorialMeasure {
    let atoms: Vec<Atom> = atoms.iter().map(|&i| Atom { t: i as f64 / 16.0, mass: 1.0 }).collect();
    let mu0 = if mu0_lebesgue {
        MeasureComponent::new(vec![WeightPiece::constant(0.0, 1.0, 1.0)], atoms)
    } else {
        MeasureComponent::atoms_only(atoms)
    };
    let mut comps = vec![mu0];
    comps.extend(tops.iter().map(|c| component(c)));
    VectorialMeasure::new(unit(), 2.0, comps).unwrap()
}

fn k1() -> impl Strategy<Value = VectorialMeasure> {
    (any::<bool>(), atoms(), cells()).prop_map(|(leb, a, c)| build(leb, &a, &[c]))
}

fn k2() -> impl Strategy<Value = VectorialMeasure> {
    (any::<bool>(), atoms(), cells(), cells()).prop_map(|(leb, a, c1, c2)| build(leb, &a, &[c1, c2]))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn omega_is_the_largest_open_bp_set(mu in k1(), i in 0usize..16, len in 1usize..8) {
        let omega = &compute_omega(&mu)[1];
        prop_assert!(!omega.inexact);
        for comp in &omega.components {
            // Compact arcs strictly inside a component are B_p.
            let w = comp.t1 - comp.t0;
            let arc = Arc::new(comp.t0 + 0.1 * w, comp.t1 - 0.1 * w);
            prop_assert_eq!(bp_membership(&mu, 1, arc).unwrap(), Decision::Yes);
        }
        // Any B_p arc lies in the closure of one component.
        let (a, b) = (i as f64 / 16.0, ((i + len).min(16)) as f64 / 16.0);
        if a < b && bp_membership(&mu, 1, Arc::new(a, b)).unwrap() == Decision::Yes {
            prop_assert!(omega.components.iter().any(|c| c.t0 <= a && b <= c.t1), "[{a}, {b}] escapes Omega_1");
        }
    }

    #[test]
    fn regular_sets_are_nested(mu in k2()) {
        let regs = regular_sets(&mu);
        prop_assert_eq!(regs.len(), 2);
        for inner in &regs[1].components {
            prop_assert!(
                regs[0].components.iter().any(|c| c.t0 <= inner.t0 && inner.t1 <= c.t1),
                "component ({}, {}) of Omega^(1) outside Omega^(0)", inner.t0, inner.t1
            );
        }
    }

    #[test]
    fn an_atom_lowers_the_kernel_by_at_most_one(mu in k2(), i in 0u8..=16) {
        let before = compute_kernel(&mu, None).unwrap().1.dim;
        let with = mu.with_atom(0, Atom { t: i as f64 / 16.0, mass: 1.0 }).unwrap();
        let after = compute_kernel(&with, None).unwrap().1.dim;
        prop_assert!(after <= before && before <= after + 1, "{before} -> {after}");
    }

    #[test]
    fn verdicts_ignore_orientation_and_scale(mu in k1(), s in 0.1f64..10.0) {
        let v = boundedness_verdict(&mu).unwrap();
        prop_assert_eq!(boundedness_verdict(&mu.reversed().unwrap()).unwrap().verdict, v.verdict);
        prop_assert_eq!(boundedness_verdict(&mu.scaled(s).unwrap()).unwrap().verdict, v.verdict);
        prop_assert_eq!(boundedness_verdict(&mu.reversed().unwrap()).unwrap().kernel_dim, v.kernel_dim);
    }

    #[test]
    fn restriction_is_idempotent(mu in k2(), a in 0u8..8, len in 1u8..8) {
        let (t0, t1) = (a as f64 / 8.0, ((a + len).min(8)) as f64 / 8.0);
        prop_assume!(t0 < t1);
        let region = Region::compact(&[(t0, t1)]);
        let once = mu.restrict(&region).unwrap();
        prop_assert_eq!(&once.restrict(&region).unwrap(), &once);
        for (r, m) in once.masses().iter().zip(mu.masses()) {
            prop_assert!(*r <= m * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn muckenhoupt_refinement_never_decreases(l1 in 0usize..5, r1 in 0usize..5, l2 in 0usize..5, r2 in 0usize..5, minus in any::<bool>()) {
        let w = |l: usize, r: usize| MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, ALPHAS[l], ALPHAS[r])], vec![]);
        let side = if minus { Side::Minus } else { Side::Plus };
        let rep = muckenhoupt(&unit(), 2.0, &w(l1, r1), &[&w(l2, r2)], Arc::new(0.0, 1.0), side, 10).unwrap();
        for pair in rep.refinement_history.windows(2) {
            prop_assert!(pair[1] >= pair[0] * (1.0 - 1e-12), "{:?}", rep.refinement_history);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn gram_matrices_are_hermitian_and_psd(mu in k2()) {
        let g = gram_matrix(&mu, 6).unwrap();
        let n = g.entries.len();
        let m = DMatrix::from_fn(n, n, |i, j| g.entries[i][j]);
        let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
        prop_assert!((&m - m.adjoint()).norm() <= 1e-12 * trace.max(1.0));
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let smallest = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(smallest >= -1e-10 * trace, "smallest eigenvalue {smallest}, trace {trace}");
    }

    #[test]
    fn sigma_max_grows_with_the_section(a in atoms(), c in cells()) {
        let mu = build(true, &a, &[c]);
        let basis = orthonormal_basis(&mu, 17).unwrap();
        let rep = multiplication_matrix(&mu, &basis, 16).unwrap();
        for pair in rep.history.windows(2) {
            prop_assert!(pair[1].sigma_max >= pair[0].sigma_max * (1.0 - 1e-12));
        }
    }
}
