//! Finite classical backends and their stock liftings.
//!
//! The classical structure interprets the object generators
//!
//! | object | functor | values |
//! |---|---|---|
//! | `P` | finite powerset | `Set` |
//! | `D` | finitely supported distributions | `Dist` |
//! | `R` | labelled pairs `ℝ × (−)` | `Pair` |
//! | `E` | exponent `(−)^K` over a finite key set | `Table` |
//! | `T` | product `P × D` | `Tuple` |
//!
//! so that `P` coalgebras are Kripke frames, `E*P` coalgebras labelled
//! transition systems, `D` coalgebras Markov chains and `D*R` coalgebras
//! Markov chains with real-labelled transitions. Morphism generators:
//! `ev[k] : E → I`, `pi[0] : T → P`, `pi[1] : T → D`, `supp : D → P` and
//! `snd : R → I`. The unit fibre `I` hosts `top` (nullary) and `neg`.

mod bisim;
pub mod gen;

use std::sync::Arc;

pub use bisim::{behavioural_quotient, Quotient};

use crate::error::EvalError;
use crate::semantics::{
    CompiledModality, DistInterp, ExponentInterp, FunctorValue, Key, Label, LabelInterp, Lifting, PowersetInterp,
    ProductInterp, Structure, SubsetPred, ValueMap,
};
use crate::signature::{FibMorphism, FibObject, ModalitySymbol, Param};
use crate::syntax::{dreq_expr, ModalityExpr};

pub fn obj(word: &str) -> FibObject {
    if word == "I" {
        FibObject::unit()
    } else {
        FibObject::from_word(word.split('*'))
    }
}

/// `□`: `S ∈ □(U)` iff `S ⊆ U`.
pub fn box_lifting() -> Lifting {
    Lifting::new("box", 1, obj("P"), |args, v| match v {
        FunctorValue::Set(items) => {
            for x in items {
                if !args[0].contains(x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        other => Err(EvalError::shape("set", other.kind())),
    })
}

/// Total mass that `d` puts on `U`.
pub fn mass_in(d: &FunctorValue, u: &dyn SubsetPred) -> Result<f64, EvalError> {
    match d {
        FunctorValue::Dist(entries) => {
            let mut total = 0.0;
            for (x, p) in entries {
                if u.contains(x)? {
                    total += p;
                }
            }
            Ok(total)
        }
        other => Err(EvalError::shape("distribution", other.kind())),
    }
}

/// `[p]=`: `d ∈ [p]=(U)` iff `Σ_{u∈U} d(u) = p` within `eps`.
pub fn deq_lifting(p: f64, eps: f64) -> Result<Lifting, EvalError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EvalError::bad_params("deq", format!("probability {p} outside [0, 1]")));
    }
    Ok(Lifting::new(format!("deq[{p}]"), 1, obj("D"), move |args, v| {
        Ok((mass_in(v, args[0])? - p).abs() <= eps)
    }))
}

/// `(σ)↓`: `(σ', u) ∈ (σ)↓(U)` iff `σ' = σ` and `u ∈ U`.
pub fn detcert_lifting(sigma: Label, eps: f64) -> Lifting {
    Lifting::new(format!("detcert[{sigma}]"), 1, obj("R"), move |args, v| match v {
        FunctorValue::Pair(l, x) => Ok(l.matches(&sigma, eps) && args[0].contains(x)?),
        other => Err(EvalError::shape("labelled pair", other.kind())),
    })
}

/// `[p, r]=` built as the composite `detcert[r] · deq[p]` at `D*R`.
pub fn dreq_lifting(st: &Structure, p: f64, r: f64) -> Result<CompiledModality, EvalError> {
    let e = dreq_expr(st.signature(), Param::Num(p), Param::Num(r))?;
    CompiledModality::compile(&e, st)
}

/// Closed form of `[p, r]=`: `Σ_{u∈U} d(r, u) = p`.
pub fn dreq_explicit(d: &FunctorValue, u: &dyn SubsetPred, p: f64, r: f64, eps: f64) -> Result<bool, EvalError> {
    let FunctorValue::Dist(entries) = d else {
        return Err(EvalError::shape("distribution", d.kind()));
    };
    let mut total = 0.0;
    for (x, q) in entries {
        match x {
            FunctorValue::Pair(Label::Real(s), inner) if (s - r).abs() <= eps => {
                if u.contains(inner)? {
                    total += q;
                }
            }
            FunctorValue::Pair(..) => {}
            other => return Err(EvalError::shape("labelled pair", other.kind())),
        }
    }
    Ok((total - p).abs() <= eps)
}

/// Nullary `⊤` on the identity functor.
pub fn top_lifting() -> Lifting {
    Lifting::new("top", 0, FibObject::unit(), |_, _| Ok(true))
}

/// Unary `¬` on the identity functor: `x ∈ ¬(U)` iff `x ∉ U`.
pub fn neg_lifting() -> Lifting {
    Lifting::new("neg", 1, FibObject::unit(), |args, v| Ok(!args[0].contains(v)?))
}

/// `ev[k]`: `t ↦ t(k)` on any exponent.
pub fn eval_nat(key: Key) -> ValueMap {
    Arc::new(move |v: &FunctorValue| match v {
        FunctorValue::Table(t) => t.get(&key),
        other => Err(EvalError::shape("table", other.kind())),
    })
}

/// `π_i` on tuples.
pub fn projection_nat(i: usize) -> ValueMap {
    Arc::new(move |v: &FunctorValue| match v {
        FunctorValue::Tuple(items) => items.get(i).cloned().ok_or_else(|| {
            EvalError::shape(format!("tuple with component {i}"), format!("{}-tuple", items.len()))
        }),
        other => Err(EvalError::shape("tuple", other.kind())),
    })
}

/// Support of a distribution, `D ⇒ P`.
pub fn support_nat() -> ValueMap {
    Arc::new(|v: &FunctorValue| match v {
        FunctorValue::Dist(entries) => Ok(FunctorValue::set(entries.iter().map(|(x, _)| x.clone()))),
        other => Err(EvalError::shape("distribution", other.kind())),
    })
}

/// Forgets the label of a pair, `R ⇒ I`.
pub fn forget_label_nat() -> ValueMap {
    Arc::new(|v: &FunctorValue| match v {
        FunctorValue::Pair(_, x) => Ok((**x).clone()),
        other => Err(EvalError::shape("labelled pair", other.kind())),
    })
}

pub(crate) fn num_param(name: &str, params: &[Param], i: usize) -> Result<f64, EvalError> {
    params
        .get(i)
        .and_then(Param::as_num)
        .ok_or_else(|| EvalError::bad_params(name, format!("parameter {i} must be a number")))
}

fn expect_params(name: &str, params: &[Param], n: usize) -> Result<(), EvalError> {
    if params.len() != n {
        return Err(EvalError::bad_params(name, format!("expected {n} parameter(s), got {}", params.len())));
    }
    Ok(())
}

pub(crate) fn label_param(p: &Param) -> Label {
    match p {
        Param::Num(x) => Label::Real(*x),
        Param::Name(s) => Label::Sym(s.clone()),
    }
}

/// Registers the unit-fibre liftings `top` and `neg`.
pub fn add_unit_liftings(st: &mut Structure) {
    st.add_lifting(FibObject::unit(), ModalitySymbol::new("top", 0), |params, _| {
        expect_params("top", params, 0)?;
        Ok(top_lifting())
    });
    st.add_lifting(FibObject::unit(), ModalitySymbol::new("neg", 1), |params, _| {
        expect_params("neg", params, 0)?;
        Ok(neg_lifting())
    });
}

/// Registers `D` with the `deq[p]` liftings.
pub fn add_distributions(st: &mut Structure) {
    st.add_functor("D", Arc::new(DistInterp));
    st.add_lifting(obj("D"), ModalitySymbol::new("deq", 1), |params, eps| {
        expect_params("deq", params, 1)?;
        deq_lifting(num_param("deq", params, 0)?, eps)
    });
}

/// Registers `R` with the `detcert[σ]` liftings.
pub fn add_labels(st: &mut Structure) {
    st.add_functor("R", Arc::new(LabelInterp));
    st.add_lifting(obj("R"), ModalitySymbol::new("detcert", 1), |params, eps| {
        expect_params("detcert", params, 1)?;
        Ok(detcert_lifting(label_param(&params[0]), eps))
    });
}

/// The classical structure described in the module documentation.
pub fn classical_structure() -> Structure {
    let mut st = Structure::new();
    st.add_functor("P", Arc::new(PowersetInterp));
    add_distributions(&mut st);
    add_labels(&mut st);
    st.add_functor("E", Arc::new(ExponentInterp::new("E")));
    st.add_functor(
        "T",
        Arc::new(ProductInterp::new(
            "T",
            vec![vec![Arc::new(PowersetInterp)], vec![Arc::new(DistInterp)]],
        )),
    );
    add_unit_liftings(&mut st);
    st.add_lifting(obj("P"), ModalitySymbol::new("box", 1), |params, _| {
        expect_params("box", params, 0)?;
        Ok(box_lifting())
    });

    st.add_nat("ev", obj("E"), FibObject::unit(), |params| {
        expect_params("ev", params, 1)?;
        let key = match &params[0] {
            Param::Name(s) => s.clone(),
            Param::Num(x) => x.to_string(),
        };
        Ok(eval_nat(Key::sym(key)))
    });
    st.add_nat_family(
        "pi",
        |params| match params {
            [Param::Num(i)] if *i == 0.0 => Ok((obj("T"), obj("P"))),
            [Param::Num(i)] if *i == 1.0 => Ok((obj("T"), obj("D"))),
            _ => Err("pi takes a component index 0 or 1".to_string()),
        },
        |params| Ok(projection_nat(num_param("pi", params, 0)? as usize)),
    );
    st.add_nat("supp", obj("D"), obj("P"), |params| {
        expect_params("supp", params, 0)?;
        Ok(support_nat())
    });
    st.add_nat("snd", obj("R"), FibObject::unit(), |params| {
        expect_params("snd", params, 0)?;
        Ok(forget_label_nat())
    });
    st
}

/// `□_k` on labelled transition systems as `□^{ev[k] * id[P]}`.
pub fn labelled_box(key: &str) -> ModalityExpr {
    ModalityExpr::superscript(
        ModalityExpr::base("box", vec![], obj("P")),
        FibMorphism::tensor(
            FibMorphism::gen("ev", vec![Param::Name(key.to_string())]),
            FibMorphism::id(obj("P")),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::StateSet;

    fn b(x: usize) -> FunctorValue {
        FunctorValue::Base(x)
    }

    fn member(l: &Lifting, u: &StateSet, v: &FunctorValue) -> bool {
        l.member(&[u as &dyn SubsetPred], v).unwrap()
    }

    #[test]
    fn box_is_subset_test() {
        let l = box_lifting();
        let s = FunctorValue::states([0, 1]);
        assert!(member(&l, &StateSet::full(2), &s));
        assert!(member(&l, &StateSet::empty(2), &FunctorValue::states([])));
        assert!(!member(&l, &StateSet::from_ids(2, [0]), &s));
    }

    #[test]
    fn deq_compares_support_mass() {
        let d = FunctorValue::dist([(b(0), 0.5), (b(1), 0.5)]).unwrap();
        assert!(member(&deq_lifting(0.5, 1e-9).unwrap(), &StateSet::from_ids(2, [0]), &d));
        assert!(member(&deq_lifting(0.0, 1e-9).unwrap(), &StateSet::empty(1), &FunctorValue::point(b(0))));
        let d = FunctorValue::dist([(b(0), 0.25), (b(1), 0.75)]).unwrap();
        assert!(!member(&deq_lifting(0.5, 1e-9).unwrap(), &StateSet::full(2), &d));
        assert!(deq_lifting(1.5, 1e-9).is_err());
    }

    #[test]
    fn detcert_matches_label_and_state() {
        let l = detcert_lifting(Label::Real(1.0), 1e-9);
        let u = StateSet::from_ids(2, [0]);
        assert!(member(&l, &u, &FunctorValue::pair(Label::Real(1.0), b(0))));
        assert!(!member(&l, &u, &FunctorValue::pair(Label::Real(2.0), b(0))));
        assert!(!member(&l, &u, &FunctorValue::pair(Label::Real(1.0), b(1))));
    }

    #[test]
    fn dreq_composite_examples() {
        let st = classical_structure();
        let d = FunctorValue::dist([
            (FunctorValue::pair(Label::Real(1.0), b(0)), 0.5),
            (FunctorValue::pair(Label::Real(2.0), b(1)), 0.5),
        ])
        .unwrap();
        let half = dreq_lifting(&st, 0.5, 1.0).unwrap();
        assert!(half.member(&[&StateSet::from_ids(2, [0])], &d).unwrap());
        assert!(!half.member(&[&StateSet::from_ids(2, [1])], &d).unwrap());
        let zero = dreq_lifting(&st, 0.0, 1.0).unwrap();
        assert!(zero.member(&[&StateSet::empty(2)], &d).unwrap());
    }

    #[test]
    fn evaluation_nat_reads_entry() {
        let t = FunctorValue::table([
            (Key::sym("a"), FunctorValue::states([0])),
            (Key::sym("b"), FunctorValue::states([1])),
        ]);
        assert_eq!(eval_nat(Key::sym("a"))(&t).unwrap(), FunctorValue::states([0]));
        assert!(matches!(eval_nat(Key::sym("c"))(&t), Err(EvalError::MissingKey(_))));
    }

    #[test]
    fn classical_signature_is_valid() {
        assert!(crate::signature::validate_signature(classical_structure().signature()).is_empty());
    }
}
