mod common;

use common::sc;
use proptest::prelude::*;

use nbhd_core::conjugacy::{Decision, Undecided};
use nbhd_core::exec::Execution;
use nbhd_core::invariant::{
    check_realizability, check_realizability_with, check_surface_relation, decide_equivalence, embed, reduce_phi,
    ueda_index, BifoliatedInvariant, CheckKind, EquivalenceMode, InvariantError, InvariantTuple,
};
use nbhd_core::jet::exp_flow;
use nbhd_core::surface::SurfaceModel;
use nbhd_core::synth::{self, bifoliated, ueda_form, TupleShape};
use nbhd_core::{DiffeoTuple, JetDiffeo, Scalar, VectorField};

fn tuple(v: Vec<JetDiffeo>) -> DiffeoTuple {
    DiffeoTuple::new(v).unwrap()
}

fn with_coeff(f: &JetDiffeo, d: usize, c: Scalar) -> JetDiffeo {
    let mut s = f.series().clone();
    s.set_coeff(d, c);
    JetDiffeo::new(s).unwrap()
}

#[test]
fn relation_examples() {
    assert!(check_surface_relation(&tuple(vec![JetDiffeo::identity(6); 4])).unwrap().passes());
    let v = VectorField::from_coeffs(8, common::ints(&[1, -1, 2, 0, 1, 0, 3]));
    let flows = tuple((1..=6).map(|s| exp_flow(&v, &Scalar::from_int(s))).collect());
    assert!(check_surface_relation(&flows).unwrap().passes());
    let f = JetDiffeo::from_ints(6, &[1, 1, 4]).unwrap();
    let id = JetDiffeo::identity(6);
    assert!(check_surface_relation(&tuple(vec![f.clone(), id.clone(), id.clone(), id.clone()]))
        .unwrap()
        .passes());
    let g = JetDiffeo::from_ints(6, &[1, 0, 1]).unwrap();
    let r = check_surface_relation(&tuple(vec![f, id.clone(), g, id])).unwrap();
    assert!(!r.passes());
    assert_eq!(r.failing_degree(), Some(4));
}

#[test]
fn realizability_examples() {
    let surface = SurfaceModel::standard(2).unwrap();
    let mut rng = synth::rng(41);
    let k = 2;
    let omega = ueda_form(&mut rng, &surface, k);
    let inv = bifoliated(&mut rng, 2, k, 8, &omega, TupleShape::Canonical);
    assert!(check_realizability(&inv, k, &omega, &surface).unwrap().passed());

    let t = &inv.transports().entries()[0];
    let wrong = inv
        .with_transports(tuple(vec![with_coeff(t, k + 1, omega.rel_periods[0].clone())]))
        .unwrap();
    let r = check_realizability(&wrong, k, &omega, &surface).unwrap();
    assert_eq!(r.failing(), vec![CheckKind::Transports]);
    let fail = &r.check(CheckKind::Transports).failures[0];
    assert_eq!((fail.degree, &fail.expected), (k + 1, &-&omega.rel_periods[0]));

    let mut f = inv.rho_f().entries().to_vec();
    f[2] = JetDiffeo::from_ints(8, &[1, 1]).unwrap();
    let low = BifoliatedInvariant::new(2, tuple(f), inv.rho_g().clone(), inv.transports().clone()).unwrap();
    let r = check_realizability(&low, k, &omega, &surface).unwrap();
    assert!(!r.check(CheckKind::Tangency).passed());

    let mut degenerate = omega.clone();
    degenerate.simple_zeros = false;
    assert_eq!(
        check_realizability(&inv, k, &degenerate, &surface).unwrap_err(),
        InvariantError::DegenerateOmega
    );
    assert!(matches!(
        check_realizability(&inv.truncate(4), k, &omega, &surface),
        Err(InvariantError::OrderTooLow { .. })
    ));
    let seq = check_realizability_with(&inv, k, &omega, &surface, Execution::Sequential).unwrap();
    assert_eq!(seq, check_realizability(&inv, k, &omega, &surface).unwrap());
}

#[test]
fn reduce_examples() {
    let surface = SurfaceModel::standard(2).unwrap();
    let mut rng = synth::rng(43);
    let omega = ueda_form(&mut rng, &surface, 1);
    let inv = bifoliated(&mut rng, 2, 1, 6, &omega, TupleShape::Canonical);
    let nb = reduce_phi(&inv).unwrap();
    assert_eq!(nb.phi_f_beta().entries(), &inv.rho_f().entries()[2..]);
    assert_eq!(nb.phi_g_alpha().entries(), &inv.rho_g().entries()[..2]);
    assert_eq!(embed(&nb), inv);

    let mut f = inv.rho_f().entries().to_vec();
    f[0] = JetDiffeo::ti_monomial(6, 6, Scalar::one());
    let bad = BifoliatedInvariant::new(2, tuple(f), inv.rho_g().clone(), inv.transports().clone()).unwrap();
    assert!(matches!(reduce_phi(&bad), Err(InvariantError::NotCanonicalPair(_))));
}

#[test]
fn equivalence_examples() {
    let surface = SurfaceModel::standard(2).unwrap();
    let mut rng = synth::rng(47);
    let k = 2;
    let omega = ueda_form(&mut rng, &surface, k);
    let a = bifoliated(&mut rng, 2, k, 8, &omega, TupleShape::Abelian);
    let psi = synth::conjugator(&mut rng, 8);
    let b = a.conjugate_by(&psi);
    let d = decide_equivalence(&a, &b, EquivalenceMode::UpToScale, Execution::Parallel).unwrap();
    assert_eq!(a.conjugate_by(d.certificate().unwrap()), b);

    // every leading coefficient doubled: s² = 1/2 has no root in ℚ(i)
    let double = |t: &DiffeoTuple| {
        tuple(t.entries().iter().map(|f| with_coeff(f, k + 1, f.coeff(k + 1).scale_int(2))).collect())
    };
    let doubled = BifoliatedInvariant::new(2, double(a.rho_f()), double(a.rho_g()), double(a.transports())).unwrap();
    assert!(matches!(
        decide_equivalence(&a, &doubled, EquivalenceMode::UpToScale, Execution::Parallel).unwrap(),
        Decision::Undecided(Undecided::RootNotInField { degree: 2, .. })
    ));

    let mut g = a.rho_g().entries().to_vec();
    g[0] = with_coeff(&g[0], 2 * k + 1, &g[0].coeff(2 * k + 1) + &Scalar::one());
    let c = BifoliatedInvariant::new(2, a.rho_f().clone(), tuple(g), a.transports().clone()).unwrap();
    let d = decide_equivalence(&a, &c, EquivalenceMode::UpToScale, Execution::Parallel).unwrap();
    assert!(d.obstruction().is_some());
}

#[test]
fn fixed_form_requires_unit_scaling() {
    let surface = SurfaceModel::standard(2).unwrap();
    let mut rng = synth::rng(53);
    let omega = ueda_form(&mut rng, &surface, 1);
    let a = bifoliated(&mut rng, 2, 1, 6, &omega, TupleShape::Abelian);
    let b = a.conjugate_by(&JetDiffeo::from_ints(6, &[2, 1]).unwrap());
    let fixed = decide_equivalence(&a, &b, EquivalenceMode::FixedForm, Execution::Sequential).unwrap();
    assert!(fixed.obstruction().is_some());
    let scaled = decide_equivalence(&a, &b, EquivalenceMode::UpToScale, Execution::Sequential).unwrap();
    assert_eq!(scaled.certificate().map(|p| p.linear_part().clone()), Some(sc("2")));
}

#[test]
fn ueda_index_examples() {
    let surface = SurfaceModel::standard(2).unwrap();
    let mut rng = synth::rng(59);
    for k in 1..=3 {
        let omega = ueda_form(&mut rng, &surface, k);
        let inv = bifoliated(&mut rng, 2, k, 2 * k + 3, &omega, TupleShape::Abelian);
        if omega.a_periods.iter().chain(&omega.b_periods).any(|p| !p.is_zero()) {
            assert_eq!(ueda_index(&inv).unwrap(), k);
        }
    }
    let id = tuple(vec![JetDiffeo::identity(6); 4]);
    let f = tuple(vec![JetDiffeo::from_ints(6, &[1, 0, 0, 1]).unwrap(); 4]);
    let same = BifoliatedInvariant::new(2, f.clone(), f, tuple(vec![JetDiffeo::identity(6)])).unwrap();
    assert_eq!(ueda_index(&same).unwrap_err(), InvariantError::FoliationsCoincide);
    let mut g = id.entries().to_vec();
    g[3] = JetDiffeo::from_ints(6, &[1, 0, 0, 5]).unwrap();
    let inv = BifoliatedInvariant::new(2, id, tuple(g), tuple(vec![JetDiffeo::identity(6)])).unwrap();
    assert_eq!(inv.ueda_index().unwrap(), 3);
}

#[test]
fn sizes_are_enforced() {
    let t = |n| tuple(vec![JetDiffeo::identity(5); n]);
    assert!(matches!(
        BifoliatedInvariant::new(2, t(4), t(3), t(1)),
        Err(InvariantError::WrongSize { expected: 4, got: 3, .. })
    ));
    assert!(matches!(
        BifoliatedInvariant::new(3, t(6), t(6), t(2)),
        Err(InvariantError::WrongSize { expected: 3, got: 2, .. })
    ));
    let bad = tuple(vec![JetDiffeo::from_ints(5, &[2]).unwrap(); 4]);
    assert!(matches!(
        BifoliatedInvariant::new(2, bad, t(4), t(1)),
        Err(InvariantError::NotTangentToIdentity(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivalence_is_reflexive_and_symmetric(seed in 0u64..10_000, k in 1usize..=2) {
        let surface = SurfaceModel::standard(2).unwrap();
        let mut rng = synth::rng(seed);
        let omega = ueda_form(&mut rng, &surface, k);
        let shape = if seed % 2 == 0 { TupleShape::Canonical } else { TupleShape::Abelian };
        let a = bifoliated(&mut rng, 2, k, 2 * k + 3, &omega, shape);
        let refl = decide_equivalence(&a, &a, EquivalenceMode::UpToScale, Execution::Sequential).unwrap();
        prop_assert_eq!(refl.certificate(), Some(&JetDiffeo::identity(2 * k + 3)));

        let psi = synth::conjugator(&mut rng, 2 * k + 3);
        let b = a.conjugate_by(&psi);
        let ab = decide_equivalence(&a, &b, EquivalenceMode::UpToScale, Execution::Sequential).unwrap();
        let ba = decide_equivalence(&b, &a, EquivalenceMode::UpToScale, Execution::Sequential).unwrap();
        let (p, q) = (ab.certificate().unwrap().clone(), ba.certificate().unwrap().clone());
        prop_assert_eq!(a.conjugate_by(&p), b.clone());
        prop_assert_eq!(b.conjugate_by(&q), a.clone());
        prop_assert_eq!(b.conjugate_by(&p.inverse()), a);
    }

    #[test]
    fn reduce_after_embed_is_identity(seed in 0u64..10_000, k in 1usize..=3) {
        let surface = SurfaceModel::standard(3).unwrap();
        let mut rng = synth::rng(seed);
        let omega = ueda_form(&mut rng, &surface, k);
        let inv = bifoliated(&mut rng, 3, k, 2 * k + 2, &omega, TupleShape::Canonical);
        let nb = reduce_phi(&inv).unwrap();
        prop_assert_eq!(reduce_phi(&embed(&nb)).unwrap(), nb);
    }

    #[test]
    fn synthesized_tuples_are_realizable(seed in 0u64..10_000, k in 1usize..=3, abelian in any::<bool>()) {
        let surface = SurfaceModel::standard(2).unwrap();
        let mut rng = synth::rng(seed);
        let omega = ueda_form(&mut rng, &surface, k);
        let shape = if abelian { TupleShape::Abelian } else { TupleShape::Canonical };
        let inv = bifoliated(&mut rng, 2, k, 2 * k + 2, &omega, shape);
        prop_assert!(check_realizability(&inv, k, &omega, &surface).unwrap().passed());
    }

    #[test]
    fn certificates_follow_the_scaling_law(seed in 0u64..10_000) {
        let surface = SurfaceModel::standard(2).unwrap();
        let mut rng = synth::rng(seed);
        let k = 1;
        let omega = ueda_form(&mut rng, &surface, k);
        let a = bifoliated(&mut rng, 2, k, 6, &omega, TupleShape::Canonical);
        let b = a.conjugate_by(&synth::conjugator(&mut rng, 6));
        let d = decide_equivalence(&a, &b, EquivalenceMode::UpToScale, Execution::Sequential).unwrap();
        let s = d.certificate().unwrap().linear_part().clone();
        let scale = s.pow(-(k as i64)).unwrap();
        let ca: Vec<Scalar> = a.composites().iter().map(|c| &c.coeff(k + 1) * &scale).collect();
        let cb: Vec<Scalar> = b.composites().iter().map(|c| c.coeff(k + 1)).collect();
        prop_assert_eq!(ca, cb);
    }
}
