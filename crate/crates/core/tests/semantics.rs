use fibred_core::classical::gen::{
    random_coalgebra, random_dyadic_dist, random_formula, random_map, random_subset, random_value, rng, FIBRES, LABELS,
};
use fibred_core::classical::{classical_structure, dreq_explicit, dreq_lifting, obj};
use fibred_core::par::Exec;
use fibred_core::semantics::{
    eval_formula_with, holds, identity_map, state_map, CompiledModality, FunctorValue, Label, StateSet, SubsetPred,
};
use fibred_core::syntax::ModalityExpr;
use proptest::prelude::*;
use rand::Rng;

fn fibre() -> impl Strategy<Value = &'static str> {
    prop::sample::select(FIBRES.to_vec())
}

proptest! {
    #[test]
    fn functor_preserves_identity_and_composition(seed in any::<u64>(), f in fibre()) {
        let st = classical_structure();
        let mut r = rng(seed);
        let v = random_value(&mut r, f, 4);
        let h1 = random_map(&mut r, 4, 3);
        let h2 = random_map(&mut r, 3, 3);
        let id = st.lift_map(&obj(f), identity_map()).unwrap();
        prop_assert_eq!(id(&v).unwrap(), v.clone());
        let composed: Vec<usize> = h1.iter().map(|&x| h2[x]).collect();
        let once = st.lift_map(&obj(f), state_map(&composed)).unwrap();
        let first = st.lift_map(&obj(f), state_map(&h1)).unwrap();
        let second = st.lift_map(&obj(f), state_map(&h2)).unwrap();
        prop_assert!(once(&v).unwrap().approx_eq(&second(&first(&v).unwrap()).unwrap(), 1e-12));
    }

    #[test]
    fn local_evaluation_agrees_with_global(seed in any::<u64>(), f in fibre(), n in 1usize..6) {
        let st = classical_structure();
        let mut r = rng(seed);
        let phi = random_formula(&mut r, f, 3);
        let c = random_coalgebra(&mut r, f, n);
        let global = eval_formula_with(&phi, &st, &c, Exec::Sequential).unwrap();
        for x in 0..n {
            prop_assert_eq!(holds(&phi, &st, &c, x).unwrap(), global.contains_state(x));
        }
        prop_assert_eq!(eval_formula_with(&phi, &st, &c, Exec::Parallel).unwrap(), global);
    }

    #[test]
    fn sequencing_is_associative(seed in any::<u64>()) {
        let st = classical_structure();
        let mut r = rng(seed);
        let n = 3;
        let boxm = || ModalityExpr::base("box", vec![], obj("P"));
        let left = CompiledModality::compile(&ModalityExpr::then(ModalityExpr::then(boxm(), boxm()), boxm()), &st).unwrap();
        let right = CompiledModality::compile(&ModalityExpr::then(boxm(), ModalityExpr::then(boxm(), boxm())), &st).unwrap();
        let inner: Vec<FunctorValue> = (0..4).map(|_| random_subset(&mut r, n, 0.5)).collect();
        let middle: Vec<FunctorValue> = (0..3)
            .map(|_| FunctorValue::set(inner.iter().filter(|_| r.random_bool(0.5)).cloned()))
            .collect();
        let v = FunctorValue::set(middle.into_iter().filter(|_| r.random_bool(0.7)));
        for mask in 0..1u64 << n {
            let u = StateSet::from_mask(n, mask);
            prop_assert_eq!(
                left.member(&[&u as &dyn SubsetPred], &v).unwrap(),
                right.member(&[&u as &dyn SubsetPred], &v).unwrap()
            );
        }
    }

    #[test]
    fn dreq_composite_matches_closed_form(seed in any::<u64>(), k in 0u32..=8, li in 0usize..2) {
        let st = classical_structure();
        let mut r = rng(seed);
        let n = 4;
        let points: Vec<FunctorValue> = LABELS
            .iter()
            .flat_map(|&l| (0..n).map(move |x| FunctorValue::pair(Label::Real(l), FunctorValue::Base(x))))
            .collect();
        let d = random_dyadic_dist(&mut r, &points, 4, 8);
        let p = k as f64 / 8.0;
        let lifting = dreq_lifting(&st, p, LABELS[li]).unwrap();
        for mask in 0..1u64 << n {
            let u = StateSet::from_mask(n, mask);
            prop_assert_eq!(
                lifting.member(&[&u as &dyn SubsetPred], &d).unwrap(),
                dreq_explicit(&d, &u, p, LABELS[li], st.eps()).unwrap()
            );
        }
    }
}

#[test]
fn box_is_the_kripke_necessity() {
    let st = classical_structure();
    let c = fibred_core::semantics::Coalgebra::indexed(
        obj("P"),
        vec![FunctorValue::states([1, 2]), FunctorValue::states([2]), FunctorValue::states([])],
    )
    .unwrap();
    let phi = fibred_core::syntax::parse_formula_at("box(box(false))", st.signature(), Some(&obj("P"))).unwrap();
    let s = eval_formula_with(&phi, &st, &c, Exec::Sequential).unwrap();
    assert_eq!(s.ids(), vec![1, 2]);
    let psi = fibred_core::syntax::parse_formula_at("box(false)", st.signature(), Some(&obj("P"))).unwrap();
    assert_eq!(eval_formula_with(&psi, &st, &c, Exec::Sequential).unwrap().ids(), vec![2]);
}
