use super::ast::{Formula, ModalityExpr};
use super::typing::type_of_formula;
use crate::error::TypeError;
use crate::signature::{FibMorphism, FibredSignature};

/// Adaptation-eliminating translation `τ_f` for `f: A → B` and `φ : B`.
///
/// Adaptations are pushed into the modalities as superscripts:
/// `τ_f(○(φ_i)) = ○^f(τ_f(φ_i))` and `τ_f(f'φ) = τ_{f'∘f}(φ)`. The result
/// has type `A` and contains no `Adapt` node.
pub fn translate(f: &FibMorphism, phi: &Formula, sig: &FibredSignature) -> Result<Formula, TypeError> {
    let (source, target) = sig.morphism_type(f)?;
    let ty = type_of_formula(phi, sig)?;
    if ty != target {
        return Err(TypeError::new(
            "",
            format!("formula of type {target} (target of `{f}`)"),
            ty.to_string(),
        ));
    }
    translate_typed(f, &source, phi, sig)
}

fn translate_typed(
    f: &FibMorphism,
    source: &crate::signature::FibObject,
    phi: &Formula,
    sig: &FibredSignature,
) -> Result<Formula, TypeError> {
    Ok(match phi {
        Formula::Top(_) => Formula::Top(source.clone()),
        Formula::Neg(inner) => Formula::not(translate_typed(f, source, inner, sig)?),
        Formula::Conj(items) => Formula::Conj(
            items
                .iter()
                .map(|x| translate_typed(f, source, x, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Apply(m, args) => Formula::Apply(
            ModalityExpr::superscript(m.clone(), f.clone()),
            args.iter()
                .map(|x| translate_typed(f, source, x, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Adapt(inner_f, inner) => {
            let composed = sig.compose_morphisms(inner_f, f)?;
            translate_typed(&composed, source, inner, sig)?
        }
    })
}

/// `τ_id`: the adaptation-free formula equivalent to `φ`.
pub fn eliminate_adaptations(phi: &Formula, sig: &FibredSignature) -> Result<Formula, TypeError> {
    let ty = type_of_formula(phi, sig)?;
    translate(&FibMorphism::Id(ty), phi, sig)
}
