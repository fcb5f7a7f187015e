mod common;

use common::{coeffs_of, conjugator, naive_compose, sc, scalar, ti_conjugator, ti_jet};
use proptest::prelude::*;

use nbhd_core::conjugacy::{decide_conjugate_tuple, Decision, Undecided};
use nbhd_core::jet::{canonical_form_ti, exp_flow, is_abelian, log_flow, JetError};
use nbhd_core::{DiffeoTuple, JetDiffeo, Scalar, Series, Tangency, VectorField};

/// Jet from its coefficients `c_0, c_1, ...` with `c_0 = 0`.
fn jet(order: usize, c: &[i64]) -> JetDiffeo {
    assert_eq!(c[0], 0);
    JetDiffeo::from_ints(order, &c[1..]).unwrap()
}

fn tuple(v: Vec<JetDiffeo>) -> DiffeoTuple {
    DiffeoTuple::new(v).unwrap()
}

/// `t/(1 - c t)` truncated: coefficients `c^{d-1}`.
fn moebius(order: usize, c: i64) -> JetDiffeo {
    let coeffs: Vec<i64> = std::iter::once(0).chain((0..order).map(|d| c.pow(d as u32))).collect();
    jet(order, &coeffs)
}

#[test]
fn group_examples() {
    let f = jet(8, &[0, 1, 3, -1, 2]);
    assert!(JetDiffeo::commutator(&f, &f).is_identity());
    assert!(JetDiffeo::commutator(&moebius(10, 1), &moebius(10, 2)).is_identity());

    // 2·f(t/2), coefficient by coefficient
    let g = jet(6, &[0, 1, 1, 5, -2]);
    let expected: Vec<Scalar> = coeffs_of(&g)
        .iter()
        .enumerate()
        .map(|(d, c)| if d == 0 { Scalar::zero() } else { c * &Scalar::ratio(1, 1 << (d - 1)) })
        .collect();
    let psi = jet(6, &[0, 2]);
    assert_eq!(coeffs_of(&g.conjugate_by(&psi)), expected);
    assert_eq!(jet(4, &[0, 1, 1]).conjugate_by(&psi.truncate(4)), JetDiffeo::from_coeffs(4, [Scalar::one(), Scalar::ratio(1, 2)]).unwrap());
}

#[test]
fn tangency_examples() {
    assert_eq!(jet(6, &[0, 1, 0, 0, 3]).tangency_order(), Ok(Tangency::Finite(3)));
    assert_eq!(JetDiffeo::identity(6).tangency_order(), Ok(Tangency::IdentityAtOrderN));
    assert_eq!(jet(6, &[0, 1, 1, 7]).tangency_order(), Ok(Tangency::Finite(1)));
    assert_eq!(jet(6, &[0, 2, 1]).tangency_order(), Err(JetError::NotTangentToIdentity));
}

#[test]
fn flow_examples() {
    let v = VectorField::from_coeffs(12, std::iter::once(Scalar::one()).chain((3..=12).map(|_| Scalar::zero())));
    assert_eq!(exp_flow(&v, &Scalar::one()), moebius(12, 1));
    assert_eq!(exp_flow(&v, &Scalar::from_int(2)), moebius(12, 2));
    assert!(exp_flow(&v, &Scalar::zero()).is_identity());
    assert_eq!(log_flow(&moebius(12, 1)).unwrap(), v);
    assert_eq!(log_flow(&JetDiffeo::identity(5)), Err(JetError::IdentityHasNoLeadingTerm));
}

/// Values of `b` admitting a polynomial `ψ = t + p t² + q t³` with
/// `ψ ∘ (t + t² + t³) = (t + t² + b t³) ∘ ψ` mod `t⁴`, over a grid.
fn brute_force_b() -> Vec<Scalar> {
    let grid: Vec<Scalar> = (-6..=6).map(|n| Scalar::ratio(n, 2)).collect();
    let f = common::ints(&[0, 1, 1, 1]);
    let mut found = Vec::new();
    for b in &grid {
        let normal = vec![Scalar::zero(), Scalar::one(), Scalar::one(), b.clone()];
        let ok = grid.iter().any(|p| {
            grid.iter().any(|q| {
                let psi = vec![Scalar::zero(), Scalar::one(), p.clone(), q.clone()];
                naive_compose(&psi, &f, 3) == naive_compose(&normal, &psi, 3)
            })
        });
        if ok {
            found.push(b.clone());
        }
    }
    found
}

#[test]
fn canonical_form_examples() {
    let f = jet(3, &[0, 1, 1, 1]);
    let cf = canonical_form_ti(&f).unwrap();
    assert_eq!((cf.k, cf.a.clone()), (1, Scalar::one()));
    assert_eq!(brute_force_b(), vec![cf.b.clone()]);
    assert_eq!(f.conjugate_by(&cf.psi), cf.normal_jet(3));

    let normal = jet(9, &[0, 1, 0, 0, 1, 0, 0, 5]);
    let cf = canonical_form_ti(&normal).unwrap();
    assert!(cf.psi.is_identity());
    assert_eq!((cf.k, cf.a, cf.b), (3, Scalar::one(), Scalar::from_int(5)));

    assert_eq!(
        canonical_form_ti(&jet(4, &[0, 1, 0, 1])),
        Err(JetError::OrderTooLowForNormalForm { k: 2, order: 4 })
    );
}

#[test]
fn decide_examples() {
    let a = tuple(vec![jet(6, &[0, 1, 2, -1]), jet(6, &[0, 1, 0, 3, 1])]);
    assert_eq!(decide_conjugate_tuple(&a, &a).unwrap(), Decision::Certificate(JetDiffeo::identity(6)));

    let a = tuple(vec![jet(2, &[0, 1, 1])]);
    let b = tuple(vec![JetDiffeo::from_coeffs(2, [Scalar::one(), Scalar::ratio(1, 2)]).unwrap()]);
    let d = decide_conjugate_tuple(&a, &b).unwrap();
    assert_eq!(d.certificate(), Some(&jet(2, &[0, 2])));

    let a = tuple(vec![jet(3, &[0, 1, 1]), jet(3, &[0, 1, 0, 1])]);
    let b = tuple(vec![jet(3, &[0, 1, 1]), jet(3, &[0, 1, 0, 2])]);
    let d = decide_conjugate_tuple(&a, &b).unwrap();
    assert_eq!(d.obstruction().map(|o| o.order), Some(3));

    let a = tuple(vec![jet(5, &[0, 1, 0, 1])]);
    let b = tuple(vec![jet(5, &[0, 1, 0, 2])]);
    assert!(matches!(
        decide_conjugate_tuple(&a, &b).unwrap(),
        Decision::Undecided(Undecided::RootNotInField { degree: 2, .. })
    ));

    let id = tuple(vec![JetDiffeo::identity(4); 3]);
    assert_eq!(decide_conjugate_tuple(&id, &id).unwrap().certificate(), Some(&JetDiffeo::identity(4)));
}

/// Over the grid of degree-3 conjugators with linear part 1 or 2, none maps
/// `(t+t², t+t³)` to `(t+t², t+2t³)` mod `t⁴`.
#[test]
fn obstruction_confirmed_by_search() {
    let grid: Vec<Scalar> = (-8..=8).map(|n| Scalar::ratio(n, 2)).collect();
    let (a1, a2) = (common::ints(&[0, 1, 1]), common::ints(&[0, 1, 0, 1]));
    let (b1, b2) = (common::ints(&[0, 1, 1]), common::ints(&[0, 1, 0, 2]));
    for s in [sc("1"), sc("2"), sc("-1")] {
        for p in &grid {
            for q in &grid {
                let psi = vec![Scalar::zero(), s.clone(), p.clone(), q.clone()];
                let ok = naive_compose(&psi, &a1, 3) == naive_compose(&b1, &psi, 3)
                    && naive_compose(&psi, &a2, 3) == naive_compose(&b2, &psi, 3);
                assert!(!ok, "unexpected conjugator {psi:?}");
            }
        }
    }
}

#[test]
fn abelian_examples() {
    let v = VectorField::from_coeffs(8, common::ints(&[1, 2, 0, -1, 0, 0, 3]));
    let flows = tuple((1..4).map(|s| exp_flow(&v, &Scalar::from_int(s))).collect());
    assert!(is_abelian(&flows));
    assert!(!is_abelian(&tuple(vec![jet(6, &[0, 1, 1]), jet(6, &[0, 1, 0, 1])])));
    let c = JetDiffeo::commutator(&jet(6, &[0, 1, 1]), &jet(6, &[0, 1, 0, 1]));
    assert!(c.tangency_order().unwrap().finite().is_some_and(|k| k >= 3));
    assert!(is_abelian(&tuple(vec![jet(6, &[0, 1, 1])])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_form_is_conjugacy_invariant(k in 1usize..=3, f in ti_jet(12, 1), psi in ti_conjugator(12)) {
        let f = if k == 1 { f } else {
            let mut s = Series::identity(12);
            for d in (k + 1)..=12 { s.set_coeff(d, f.coeff(d - k + 1)); }
            JetDiffeo::new(s).unwrap()
        };
        let a = canonical_form_ti(&f).unwrap();
        let b = canonical_form_ti(&f.conjugate_by(&psi)).unwrap();
        prop_assert_eq!((a.k, &a.a, &a.b), (b.k, &b.a, &b.b));
        prop_assert_eq!(f.conjugate_by(&a.psi), a.normal_jet(12));
    }

    #[test]
    fn leading_coefficient_scales(f in ti_jet(10, 2), psi in conjugator(10)) {
        let a = canonical_form_ti(&f).unwrap();
        let b = canonical_form_ti(&f.conjugate_by(&psi)).unwrap();
        let s_k = psi.linear_part().pow(-2).unwrap();
        prop_assert_eq!(b.k, 2);
        prop_assert_eq!(b.a, &a.a * &s_k);
    }

    #[test]
    fn decide_is_sound_and_complete(
        f0 in ti_jet(10, 1),
        f1 in ti_jet(10, 2),
        f2 in ti_jet(10, 1),
        psi in conjugator(10),
    ) {
        let a = tuple(vec![f0, f1, f2]);
        let b = a.conjugate_by(&psi);
        let d = decide_conjugate_tuple(&a, &b).unwrap();
        let cert = d.certificate().cloned();
        prop_assert!(cert.is_some(), "no certificate: {:?}", d);
        prop_assert_eq!(a.conjugate_by(&cert.unwrap()), b);
    }

    #[test]
    fn log_and_exp_are_inverse(f in ti_jet(14, 2)) {
        let v = log_flow(&f).unwrap();
        prop_assert_eq!(exp_flow(&v, &Scalar::one()), f);
    }

    #[test]
    fn time_maps_commute(c in prop::collection::vec(scalar(), 9), s in scalar(), u in scalar()) {
        let v = VectorField::from_coeffs(10, std::iter::once(Scalar::one()).chain(c));
        let (a, b) = (exp_flow(&v, &s), exp_flow(&v, &u));
        prop_assert!(JetDiffeo::commutator(&a, &b).is_identity());
        prop_assert_eq!(a.compose(&b), exp_flow(&v, &(&s + &u)));
    }
}
