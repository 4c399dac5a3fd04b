use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::*;
use crate::curve::Curve;
use crate::measure::{Atom, MeasureComponent, Profile, VectorialMeasure, WeightForm, WeightPiece};
use crate::weight::local::Decision;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn seg11() -> Curve {
    Curve::segment(c(-1.0), c(1.0)).unwrap()
}

fn unit() -> Curve {
    Curve::segment(c(0.0), c(1.0)).unwrap()
}

fn steps(extra: &[f64]) -> VectorialMeasure {
    let mut atoms = vec![Atom { t: 1.0, mass: 1.0 }];
    atoms.extend(extra.iter().map(|x| Atom { t: x + 1.0, mass: 1.0 }));
    let comps = vec![
        MeasureComponent::atoms_only(atoms),
        MeasureComponent::default(),
        MeasureComponent::new(vec![WeightPiece::constant(0.0, 1.0, 1.0), WeightPiece::zero(1.0, 2.0)], vec![]),
        MeasureComponent::new(vec![WeightPiece::zero(0.0, 1.0), WeightPiece::constant(1.0, 2.0, 1.0)], vec![]),
    ];
    VectorialMeasure::new(seg11(), 2.0, comps).unwrap()
}

fn jacobi(a: f64, b: f64) -> MeasureComponent {
    // (1 - x)^a (1 + x)^b with t = x + 1.
    MeasureComponent::new(vec![WeightPiece::power(0.0, 2.0, 1.0, b, a)], vec![])
}

#[test]
fn step_example_is_unbounded_with_a_certificate() {
    let v = boundedness_verdict(&steps(&[])).unwrap();
    assert_eq!(v.verdict, Verdict::Unbounded);
    assert_eq!(v.kernel_dim, 2);
    let cert = v.certificate.unwrap();
    assert!(cert.valid, "{cert:?}");
    assert!(cert.norm_h < 1e-8 * cert.scale);
    assert!(cert.norm_zh > 1e-6 * cert.scale);
}

#[test]
fn two_more_deltas_make_it_bounded() {
    let v = boundedness_verdict(&steps(&[-0.5, 0.5])).unwrap();
    assert_eq!(v.verdict, Verdict::Bounded);
    assert_eq!(v.theorem, Theorem::Mult1);
    assert_eq!(v.kernel_dim, 0);
    let a = &v.evidence.type_a;
    assert_eq!(a.is_type_a, Decision::Yes);
    assert!(a.arcs.iter().all(|arc| arc.case == 2), "{:?}", a.arcs);
}

#[test]
fn k1_with_a_single_delta() {
    let mu = VectorialMeasure::new(
        seg11(),
        2.0,
        vec![MeasureComponent::atoms_only(vec![Atom { t: 1.0, mass: 1.0 }]), MeasureComponent::lebesgue(2.0, 1.0)],
    )
    .unwrap();
    let v = boundedness_verdict(&mu).unwrap();
    assert_eq!(v.verdict, Verdict::Bounded);
    assert!(v.applicable.contains(&Theorem::Mult3));
    let pk = v.prop_k1.unwrap();
    assert_eq!((pk.components, pk.zero_mass_components, pk.agrees), (1, 0, true));
}

#[test]
fn k1_without_mu0_is_unbounded() {
    let mu =
        VectorialMeasure::new(seg11(), 2.0, vec![MeasureComponent::default(), MeasureComponent::lebesgue(2.0, 1.0)])
            .unwrap();
    let v = boundedness_verdict(&mu).unwrap();
    assert_eq!(v.verdict, Verdict::Unbounded);
    assert_eq!(v.prop_k1.unwrap().zero_mass_components, 1);
    assert!(v.certificate.unwrap().valid);
}

#[test]
fn jacobi_weights_are_type_b_and_a() {
    let mu = VectorialMeasure::new(seg11(), 2.0, vec![jacobi(0.5, -0.5), jacobi(0.5, -0.5)]).unwrap();
    let cl = classify(&mu);
    assert_eq!(cl.type_b.is_type_b, Decision::Yes);
    assert_eq!(cl.type_a.is_type_a, Decision::Yes);
    let v = boundedness_verdict(&mu).unwrap();
    assert_eq!(v.verdict, Verdict::Bounded);
}

#[test]
fn zero_weights_are_case_one() {
    let mu =
        VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), MeasureComponent::default()])
            .unwrap();
    let a = classify_type_a(&mu);
    assert_eq!(a.is_type_a, Decision::Yes);
    assert!(a.arcs.iter().all(|x| x.case == 1 && x.k2 == 0));
}

#[test]
fn consistency_found_numerically_gives_case_three() {
    // w_1 = t^3 given without annotations: not B_p at 0, but right-consistent.
    let w1 = MeasureComponent::new(
        vec![WeightPiece::new(
            0.0,
            1.0,
            WeightForm::General { evaluator: Profile::Polynomial { coeffs: vec![0.0, 0.0, 0.0, 1.0] } },
        )],
        vec![],
    );
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), w1]).unwrap();
    let cl = classify(&mu);
    assert_eq!(cl.type_a.is_type_a, Decision::Yes, "{:?}", cl.type_a);
    assert_eq!(cl.type_a.arcs[0].case, 3);
    assert_eq!(cl.type_b.is_type_b, Decision::Unknown);
}

#[test]
fn type_c_endpoint_labels() {
    // w_1 = t^3 (1 - t)^{1/2}: (2.4) at the start, (3.2) at the end.
    let w1 = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 3.0, 0.5)], vec![]);
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), w1]).unwrap();
    let r = classify_type_c(&mu);
    assert_eq!(r.is_type_c, Decision::Yes, "{r:?}");
    assert_eq!(r.start[0].label.as_deref(), Some("2.4"));
    assert_eq!(r.end[0].label.as_deref(), Some("3.2"));
    let w1 = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 1.0, 0.0)], vec![]);
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::default(), w1]).unwrap();
    let r = classify_type_c(&mu);
    assert_eq!(r.start[0].label.as_deref(), Some("2.3"));
    // Type C with int w_1 > 0: bounded iff mu_0 has mass; here it has none.
    let v = boundedness_verdict(&mu).unwrap();
    assert!(v.applicable.contains(&Theorem::Mult4));
    assert_eq!(v.mu0_positive, Some(false));
    assert_eq!(v.verdict, Verdict::Unbounded);
}

#[test]
fn type_c_needs_an_open_curve() {
    let circle = Curve::full_circle(c(0.0), 1.0).unwrap();
    let l = circle.length();
    let mu = VectorialMeasure::new(
        circle,
        2.0,
        vec![MeasureComponent::lebesgue(l, 1.0), MeasureComponent::lebesgue(l, 1.0)],
    )
    .unwrap();
    assert_eq!(classify_type_c(&mu).is_type_c, Decision::No);
    assert_eq!(boundedness_verdict(&mu).unwrap().verdict, Verdict::Bounded);
}

#[test]
fn esd_examples() {
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0); 3]).unwrap();
    let r = esd(&mu).unwrap();
    assert_eq!(r.is_esd, Decision::Yes);
    assert!((r.constant.unwrap() - 1.0).abs() < 1e-14);

    let mu = VectorialMeasure::new(
        seg11(),
        2.0,
        vec![MeasureComponent::atoms_only(vec![Atom { t: 1.0, mass: 1.0 }]), MeasureComponent::lebesgue(2.0, 1.0)],
    )
    .unwrap();
    let r = esd(&mu).unwrap();
    assert_eq!(r.is_esd, Decision::No);
    assert_eq!(r.constant, None);

    // x^2 is dominated by 1 on [0, 1], not the other way round.
    let sq = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 2.0, 0.0)], vec![]);
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), sq.clone()]).unwrap();
    assert_eq!(esd(&mu).unwrap().is_esd, Decision::Yes);
    let mu = VectorialMeasure::new(unit(), 2.0, vec![sq, MeasureComponent::lebesgue(1.0, 1.0)]).unwrap();
    assert_eq!(esd(&mu).unwrap().is_esd, Decision::No);
}

#[test]
fn closure_of_the_step_example() {
    let mu = steps(&[]);
    let cl = esd_closure(&mu).unwrap();
    let dens = |j: usize, t: f64| cl.component(j).density(t);
    let expected: [[f64; 2]; 4] = [[1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [0.0, 1.0]];
    for (j, e) in expected.iter().enumerate() {
        assert_eq!(dens(j, 0.5), e[0], "j = {j}");
        assert_eq!(dens(j, 1.5), e[1], "j = {j}");
    }
    assert_eq!(cl.component(0).atoms, vec![Atom { t: 1.0, mass: 1.0 }]);
    assert!(cl.component(1).atoms.is_empty());
    for j in 0..4 {
        let want: f64 = mu.components()[j..].iter().map(|c| c.total_mass()).sum();
        assert!((cl.component(j).total_mass() - want).abs() < 1e-12);
    }
    // The closure is dominated step by step.
    assert_eq!(esd(&cl).unwrap().is_esd, Decision::Yes);
}

#[test]
fn closure_sums_different_powers() {
    let sq = MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 2.0, 0.0)], vec![]);
    let mu = VectorialMeasure::new(unit(), 2.0, vec![MeasureComponent::lebesgue(1.0, 1.0), sq]).unwrap();
    let cl = esd_closure(&mu).unwrap();
    let piece = &cl.component(0).pieces[0];
    assert!(matches!(piece.form, WeightForm::Sum { .. }));
    assert!((cl.component(0).ac_mass() - 4.0 / 3.0).abs() < 1e-12);
    assert!((piece.eval(0.5) - 1.25).abs() < 1e-15);
}

#[test]
fn verdicts_survive_reversal_and_scaling() {
    let cases: Vec<VectorialMeasure> = vec![steps(&[]), steps(&[-0.5, 0.5]), steps(&[-0.5])];
    for mu in cases {
        let v = boundedness_verdict(&mu).unwrap();
        let r = boundedness_verdict(&mu.reversed().unwrap()).unwrap();
        let s = boundedness_verdict(&mu.scaled(3.5).unwrap()).unwrap();
        assert_eq!(v.verdict, r.verdict);
        assert_eq!(v.verdict, s.verdict);
        assert_eq!(v.kernel_dim, r.kernel_dim);
    }
}

#[test]
fn power_weight_vanishing_at_both_ends_is_type_a() {
    // x^2 (1 - x)^2 is monotone up to constants only on each half.
    let comps = vec![
        MeasureComponent::default(),
        MeasureComponent::new(vec![WeightPiece::power(0.0, 1.0, 1.0, 2.0, 2.0)], vec![]),
    ];
    let mu = VectorialMeasure::new(unit(), 2.0, comps).unwrap();
    let cls = classify(&mu);
    assert_eq!(cls.type_b.is_type_b, Decision::Yes);
    assert_eq!(cls.type_a.is_type_a, Decision::Yes);
    assert_eq!(cls.type_a.partition, vec![0.0, 0.5, 1.0]);
}
