use fibred_core::classical::gen::{modality_catalogue, morphism_catalogue, random_coalgebra, random_formula, rng, FIBRES};
use fibred_core::classical::{classical_structure, obj};
use fibred_core::semantics::eval_formula;
use fibred_core::signature::{FibMorphism, FibObject};
use fibred_core::syntax::{eliminate_adaptations, parse_formula_at, parse_modality, translate, type_of_formula, type_of_modality, Formula};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = FibObject> {
    prop::collection::vec(prop::sample::select(vec!["P", "D", "R", "E", "T"]), 0..4).prop_map(FibObject::from_word)
}

proptest! {
    #[test]
    fn tensor_is_a_monoid(a in word(), b in word(), c in word()) {
        prop_assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        prop_assert_eq!(a.tensor(&FibObject::unit()), a.clone());
        prop_assert_eq!(FibObject::unit().tensor(&a), a);
    }

    #[test]
    fn normal_form_absorbs_identities(i in 0usize..64, j in 0usize..64) {
        let cat = morphism_catalogue();
        let (f, s, _) = cat[i % cat.len()].clone();
        let padded = FibMorphism::Compose(Box::new(FibMorphism::id(obj(s))), Box::new(f.clone()));
        prop_assert_eq!(padded.normal_form(), f.normal_form());
        let (g, _, _) = cat[j % cat.len()].clone();
        let h = FibMorphism::gen("supp", vec![]);
        let left = FibMorphism::Compose(Box::new(FibMorphism::Compose(Box::new(h.clone()), Box::new(g.clone()))), Box::new(f.clone()));
        let right = FibMorphism::Compose(Box::new(h), Box::new(FibMorphism::Compose(Box::new(g), Box::new(f))));
        prop_assert_eq!(left.normal_form(), right.normal_form());
    }

    #[test]
    fn generated_formulas_have_their_fibre(seed in any::<u64>(), fi in 0usize..5, depth in 0usize..4) {
        let st = classical_structure();
        let fibre = FIBRES[fi];
        let phi = random_formula(&mut rng(seed), fibre, depth);
        prop_assert_eq!(type_of_formula(&phi, st.signature()).unwrap(), obj(fibre));
    }

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>(), fi in 0usize..5) {
        let st = classical_structure();
        let fibre = FIBRES[fi];
        let phi = random_formula(&mut rng(seed), fibre, 3);
        let text = phi.to_string();
        let back = parse_formula_at(&text, st.signature(), Some(&obj(fibre))).unwrap();
        let c = random_coalgebra(&mut rng(seed ^ 1), fibre, 3);
        prop_assert_eq!(eval_formula(&back, &st, &c).unwrap(), eval_formula(&phi, &st, &c).unwrap(), "{}", text);
    }

    #[test]
    fn translation_respects_composition(seed in any::<u64>()) {
        let st = classical_structure();
        let sig = st.signature();
        // f: T → D then g: D → P.
        let f = FibMorphism::gen("pi", vec![fibred_core::signature::Param::Num(1.0)]);
        let g = FibMorphism::gen("supp", vec![]);
        let phi = random_formula(&mut rng(seed), "P", 3);
        let gf = FibMorphism::Compose(Box::new(g.clone()), Box::new(f.clone()));
        let once = translate(&gf, &phi, sig).unwrap();
        let twice = translate(&f, &translate(&g, &phi, sig).unwrap(), sig).unwrap();
        let c = random_coalgebra(&mut rng(seed ^ 7), "T", 4);
        prop_assert_eq!(eval_formula(&once, &st, &c).unwrap(), eval_formula(&twice, &st, &c).unwrap());
    }

    #[test]
    fn eliminated_formulas_have_no_adaptations(seed in any::<u64>(), fi in 0usize..5) {
        let st = classical_structure();
        let phi = random_formula(&mut rng(seed), FIBRES[fi], 3);
        let flat = eliminate_adaptations(&phi, st.signature()).unwrap();
        prop_assert!(!has_adaptation(&flat));
    }
}

fn has_adaptation(phi: &Formula) -> bool {
    match phi {
        Formula::Top(_) => false,
        Formula::Neg(a) => has_adaptation(a),
        Formula::Conj(items) => items.iter().any(has_adaptation),
        Formula::Adapt(..) => true,
        Formula::Apply(_, args) => args.iter().any(has_adaptation),
    }
}

#[test]
fn catalogued_modalities_are_unary_at_their_fibre() {
    let st = classical_structure();
    for fibre in FIBRES {
        for m in modality_catalogue(fibre) {
            let ty = type_of_modality(&m, st.signature()).unwrap();
            assert_eq!(ty.arity, 1, "{m}");
            assert_eq!(ty.fibre, obj(fibre), "{m}");
        }
    }
}

#[test]
fn derived_modalities_expand() {
    let st = classical_structure();
    let sig = st.signature();
    let dreq = parse_modality("dreq[0.5, 1]", sig).unwrap();
    assert_eq!(dreq.to_string(), "(detcert[1] . deq[0.5])");
    assert_eq!(type_of_modality(&dreq, sig).unwrap().fibre, obj("D*R"));
    assert!(parse_formula_at("box(", sig, Some(&obj("P"))).is_err());
    assert!(parse_formula_at("deq[0.5](true)", sig, Some(&obj("P"))).is_err());
}
