use ssys_core::replicator::{
    boundary_report, corner_eigenvalues, embed, facet_monotonicity, BoundaryPiece, FacetMonotonicity,
    HeteroclinicStatus, SimplexState,
};
use ssys_core::scenarios::{named, ScenarioArgs};
use ssys_core::*;

fn section7(b2: f64) -> ExpParams {
    ExpParams::from_arrays([0.0, -8.0, 10.0, -20.0], [0.0, b2, 20.0, 28.0])
}

/// Every small-integer tuple with coordinates in `[-r, r]`, in a fixed order.
fn small_tuples(r: i64) -> impl Iterator<Item = ExpParams> {
    let n = (2 * r + 1) as usize;
    (0..n.pow(8)).map(move |mut k| {
        let mut v = [0i64; 8];
        for x in v.iter_mut() {
            *x = (k % n) as i64 - r;
            k /= n;
        }
        ExpParams::from_arrays([0, 1, 2, 3].map(|i| v[i] as f64), [4, 5, 6, 7].map(|i| v[i] as f64))
    })
}

#[test]
fn gallery_matches_the_exact_classifier() {
    for s in case_gallery() {
        let exact = s.params.to_exact().unwrap();
        let cl = classify(&exact).unwrap();
        assert_eq!((cl.verdict, cl.case), (s.expected.verdict, s.expected.case), "{}", s.name);
        assert_eq!(robust_permanence(&exact).unwrap(), s.expected.robust, "{}", s.name);
        let fl = classify(&s.params).unwrap();
        assert_eq!((fl.verdict, fl.case), (cl.verdict, cl.case), "{}", s.name);
    }
}

#[test]
fn gallery_covers_every_label() {
    let gallery = case_gallery();
    for label in CaseLabel::CLASSIFIER {
        assert!(gallery.iter().any(|s| s.expected.case == Some(label)), "{label}");
    }
    for rc in [RobustCase::A, RobustCase::B1, RobustCase::B2, RobustCase::B3, RobustCase::B4] {
        assert!(gallery.iter().any(|s| s.expected.robust == Some(rc)), "{rc}");
    }
    for s in &gallery {
        assert_eq!(named(&s.name, &ScenarioArgs::default()).unwrap(), *s);
    }
}

#[test]
fn selkov_examples() {
    let half = classify(&selkov(1.0, 0.5).unwrap().params).unwrap();
    assert_eq!((half.verdict, half.case), (Verdict::Permanent, Some(CaseLabel::A)));
    assert_eq!(robust_permanence(&selkov(1.0, 0.5).unwrap().params).unwrap(), Some(RobustCase::A));
    assert_eq!(classify(&selkov(1.0, 2.0).unwrap().params).unwrap().verdict, Verdict::NotPermanent);
    let one = selkov(1.0, 1.0).unwrap().params;
    assert_eq!(classify(&one).unwrap().case, Some(CaseLabel::B2));
    assert_eq!(robust_permanence(&one).unwrap(), None);
    let spec = classify_s_system(&SSystemSpec::selkov(1.0, 0.5)).unwrap();
    assert_eq!(spec.verdict, Verdict::Permanent);
    assert!(selkov(0.0, 1.0).is_err());
}

#[test]
fn lotka_examples() {
    let on_line = classify(&lotka(1.0, 1.5, 0.5).unwrap().params).unwrap();
    assert_eq!((on_line.verdict, on_line.case), (Verdict::Permanent, Some(CaseLabel::C1b)));
    assert_eq!(on_line.l, Some(1.0));
    let slow = classify(&lotka(0.2, 1.5, 0.5).unwrap().params).unwrap();
    assert_eq!(slow.verdict, Verdict::NotPermanent);
    let spec = classify_s_system(&SSystemSpec::lotka(1.0, 0.5, 2.0)).unwrap();
    assert_eq!(spec.verdict, Verdict::NotPermanent);
    for (k, al, be) in [(1.0, 0.5, 0.5), (1.0, 1.0, 0.5), (1.0, 0.5, 1.0), (1.0, 1.5, 0.8), (2.0, 2.5, 0.5)] {
        let s = lotka(k, al, be).unwrap();
        let cl = classify(&s.params).unwrap();
        assert_eq!((cl.verdict, cl.case), (s.expected.verdict, s.expected.case), "{}", s.name);
    }
}

#[test]
fn baseline_is_undetermined() {
    let cl = classify(&section7(35.0).to_exact().unwrap()).unwrap();
    assert_eq!((cl.verdict, cl.case), (Verdict::Undetermined, Some(CaseLabel::HetA)));
    assert_eq!(cl.l_infinity, Some(0.0));
    let j = jacobian(&section7(35.0));
    assert_eq!((j.j11, j.j12, j.j21, j.j22), (8.0, -35.0, 30.0, -8.0));
    let three = named("three-cycle", &ScenarioArgs::default()).unwrap();
    assert_eq!(three.expected.verdict, Verdict::Undetermined);
}

#[test]
fn baseline_perturbations() {
    let cl = classify(&section7(35.0 - 0.01)).unwrap();
    assert_eq!(cl.verdict, Verdict::Permanent);
    assert!((cl.l_infinity.unwrap() - 38.4).abs() < 1e-9);
    assert_eq!(robust_permanence(&section7(34.99)).unwrap(), Some(RobustCase::C1));
    let spiral = case_gallery().into_iter().find(|s| s.name == "het-a-outward-spiral").unwrap();
    let cl = classify(&spiral.params).unwrap();
    assert_eq!((cl.verdict, cl.case), (Verdict::NotPermanent, Some(CaseLabel::HetA)));
    assert!((cl.l_infinity.unwrap() + 384.0).abs() < 1e-9);
}

#[test]
fn focal_value_examples() {
    let q = focal_value_l1(&section7(35.0).to_exact().unwrap()).unwrap().to_f64();
    assert_eq!((q.trace, q.det, q.d, q.l1), (0.0, 986.0, 480.0, 0.0));
    // b3 = b4 with tr J = 0 and a1 = b1 = 0
    let flat = ExpParams::from_arrays([0.0, 0.0, 2.0, -1.0], [0.0, 1.0, 3.0, 3.0]);
    assert_eq!(focal_value_l1(&flat).unwrap().l1, 0.0);
    let shifted = ExpParams::from_arrays([1.0, -8.0, 10.0, -20.0], [0.0, 35.0, 20.0, 28.0]);
    assert!(focal_value_l1(&shifted).is_err());
}

fn edges(pieces: &[BoundaryPiece]) -> Vec<(usize, usize)> {
    pieces
        .iter()
        .filter_map(|p| match p {
            BoundaryPiece::Edge { edge, .. } => Some(*edge),
            BoundaryPiece::Curve { .. } => None,
        })
        .collect()
}

fn curves(pieces: &[BoundaryPiece]) -> Vec<Vec<usize>> {
    pieces
        .iter()
        .filter_map(|p| match p {
            BoundaryPiece::Curve { face } => Some(face.clone()),
            BoundaryPiece::Edge { .. } => None,
        })
        .collect()
}

#[test]
fn quadrangle_boundary_is_the_heteroclinic_cycle() {
    let s = case_gallery().into_iter().find(|s| s.name == "het-a-repelling").unwrap();
    let r = boundary_report(&embed(&s.params)).unwrap();
    assert_eq!(edges(&r.pieces), vec![(1, 3), (1, 4), (2, 3), (2, 4)]);
    assert_eq!(r.heteroclinic, HeteroclinicStatus::Cycle { corners: vec![1, 3, 2, 4, 1] });
}

#[test]
fn one_vanishing_entry_gives_two_edges_and_a_curve() {
    use Sign::*;
    let p = small_tuples(2)
        .find(|p| {
            let db = p.deadband();
            c_vector(p).signs(&db) == [Pos, Zero, Neg, Neg]
        })
        .unwrap();
    let r = boundary_report(&embed(&p)).unwrap();
    let mut e = edges(&r.pieces);
    e.sort();
    assert_eq!(e, vec![(2, 3), (2, 4)]);
    assert_eq!(curves(&r.pieces), vec![vec![1, 3, 4]]);
    assert!(r.triangle.is_none());
}

#[test]
fn coincident_vertices_give_a_planar_triangle() {
    let s = case_gallery().into_iter().find(|s| s.name == "c1c").unwrap();
    let r = boundary_report(&embed(&s.params)).unwrap();
    assert_eq!(r.c_signs, [Sign::Pos, Sign::Zero, Sign::Neg, Sign::Zero]);
    let tri = r.triangle.unwrap();
    let mid = SimplexState { x: [0.5, 0.0, 0.5, 0.0] };
    for v in [SimplexState::corner(2), SimplexState::corner(4), mid] {
        assert!(tri.contains(&v), "{v:?} not in {tri:?}");
    }
}

#[test]
fn corner_four_eigenvalues() {
    for p in small_tuples(1).step_by(997).take(50) {
        let ev = corner_eigenvalues(&embed(&p), 4);
        let toward = |l: usize| ev.iter().find(|(k, _)| *k == l).unwrap().1;
        assert_eq!(toward(1), p.b[3] - p.b[0]);
        assert_eq!(toward(2), p.b[3] - p.b[1]);
    }
}

#[test]
fn facet_monotonicity_examples() {
    let near_e34 = small_tuples(2)
        .find(|p| c_vector(p).c[0] > 0.0 && p.b[3] > p.b[2])
        .unwrap();
    assert_eq!(
        facet_monotonicity(&embed(&near_e34), [2, 3, 4]).unwrap(),
        FacetMonotonicity::Monotone {
            coordinate: 2,
            near: (3, 4),
            sign: Sign::Neg
        }
    );
    let near_e12 = small_tuples(2)
        .find(|p| c_vector(p).c[3] < 0.0 && p.a[1] < p.a[0])
        .unwrap();
    assert_eq!(
        facet_monotonicity(&embed(&near_e12), [1, 2, 3]).unwrap(),
        FacetMonotonicity::Monotone {
            coordinate: 3,
            near: (1, 2),
            sign: Sign::Pos
        }
    );
}

#[test]
fn missing_equilibrium_is_degenerate() {
    // identical monomials in each row, unequal rate constants
    let mut spec = SSystemSpec::selkov(1.0, 1.0);
    (spec.g11, spec.g12, spec.g21, spec.g22) = (spec.h11, spec.h12, spec.h21, spec.h22);
    spec.alpha1 = 2.0;
    let cl = classify_s_system(&spec).unwrap();
    assert_eq!((cl.verdict, cl.reason), (Verdict::Degenerate, Reason::NoEquilibrium));
}
