use std::fmt;

use super::ast::{Formula, ModalityExpr};
use crate::error::TypeError;
use crate::signature::{FibObject, FibredSignature};

/// The type `A^α → A` of a modality expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalityType {
    pub fibre: FibObject,
    pub arity: usize,
}

impl fmt::Display for ModalityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} -> {}", self.fibre, self.arity, self.fibre)
    }
}

pub fn type_of_modality(e: &ModalityExpr, sig: &FibredSignature) -> Result<ModalityType, TypeError> {
    match e {
        ModalityExpr::Base {
            symbol,
            fibre,
            ..
        } => {
            let fibre = sig
                .expand_object(fibre)
                .map_err(|msg| TypeError::new("/base", "declared fibre", msg))?;
            let decl = sig
                .modal_signature(&fibre)
                .find(|s| &s.name == symbol)
                .ok_or_else(|| {
                    TypeError::new(
                        "/base",
                        format!("modality declared at {fibre}"),
                        format!("undeclared symbol `{symbol}`"),
                    )
                })?;
            Ok(ModalityType {
                fibre,
                arity: decl.arity,
            })
        }
        ModalityExpr::Neg(inner) => type_of_modality(inner, sig).map_err(|e| e.at("/neg")),
        ModalityExpr::Conj(items) => {
            let first = items
                .first()
                .ok_or_else(|| TypeError::new("/conj", "nonempty conjunction", "empty conjunction"))?;
            let ty = type_of_modality(first, sig).map_err(|e| e.at("/conj/0"))?;
            for (i, item) in items.iter().enumerate().skip(1) {
                let other = type_of_modality(item, sig).map_err(|e| e.at(&format!("/conj/{i}")))?;
                if other != ty {
                    return Err(TypeError::new(format!("/conj/{i}"), ty.to_string(), other.to_string()));
                }
            }
            Ok(ty)
        }
        ModalityExpr::Superscript(inner, f) => {
            let inner_ty = type_of_modality(inner, sig).map_err(|e| e.at("/sup"))?;
            let (source, target) = sig.morphism_type(f).map_err(|e| e.at("/sup/morphism"))?;
            if target != inner_ty.fibre {
                return Err(TypeError::new(
                    "/sup/morphism",
                    format!("morphism into {}", inner_ty.fibre),
                    format!("`{f}` : {source} -> {target}"),
                ));
            }
            Ok(ModalityType {
                fibre: source,
                arity: inner_ty.arity,
            })
        }
        ModalityExpr::Then(first, second) => {
            let a = type_of_modality(first, sig).map_err(|e| e.at("/then/0"))?;
            let b = type_of_modality(second, sig).map_err(|e| e.at("/then/1"))?;
            if b.arity != 1 {
                return Err(TypeError::new(
                    "/then/1",
                    "unary modality",
                    b.to_string(),
                ));
            }
            Ok(ModalityType {
                fibre: b.fibre.tensor(&a.fibre),
                arity: a.arity,
            })
        }
        ModalityExpr::Weaken {
            inner,
            arity,
            index,
        } => {
            let ty = type_of_modality(inner, sig).map_err(|e| e.at("/weaken"))?;
            if ty.arity != 1 {
                return Err(TypeError::new("/weaken", "unary modality", ty.to_string()));
            }
            if index >= arity {
                return Err(TypeError::new(
                    "/weaken",
                    format!("index below {arity}"),
                    format!("index {index}"),
                ));
            }
            Ok(ModalityType {
                fibre: ty.fibre,
                arity: *arity,
            })
        }
    }
}

pub fn type_of_formula(phi: &Formula, sig: &FibredSignature) -> Result<FibObject, TypeError> {
    match phi {
        Formula::Top(o) => sig
            .expand_object(o)
            .map_err(|msg| TypeError::new("/top", "declared object", msg)),
        Formula::Neg(inner) => type_of_formula(inner, sig).map_err(|e| e.at("/neg")),
        Formula::Conj(items) => {
            let first = items
                .first()
                .ok_or_else(|| TypeError::new("/conj", "nonempty conjunction", "empty conjunction"))?;
            let ty = type_of_formula(first, sig).map_err(|e| e.at("/conj/0"))?;
            for (i, item) in items.iter().enumerate().skip(1) {
                let other = type_of_formula(item, sig).map_err(|e| e.at(&format!("/conj/{i}")))?;
                if other != ty {
                    return Err(TypeError::new(format!("/conj/{i}"), ty.to_string(), other.to_string()));
                }
            }
            Ok(ty)
        }
        Formula::Adapt(f, inner) => {
            let (source, target) = sig.morphism_type(f).map_err(|e| e.at("/adapt/morphism"))?;
            let inner_ty = type_of_formula(inner, sig).map_err(|e| e.at("/adapt"))?;
            if inner_ty != target {
                return Err(TypeError::new(
                    "/adapt",
                    format!("formula of type {target}"),
                    inner_ty.to_string(),
                ));
            }
            Ok(source)
        }
        Formula::Apply(m, args) => {
            let ty = type_of_modality(m, sig).map_err(|e| e.at("/apply/modality"))?;
            if args.len() != ty.arity {
                return Err(TypeError::new(
                    "/apply",
                    format!("{} argument(s)", ty.arity),
                    format!("{} argument(s)", args.len()),
                ));
            }
            for (i, a) in args.iter().enumerate() {
                let at = type_of_formula(a, sig).map_err(|e| e.at(&format!("/apply/arg{i}")))?;
                if at != ty.fibre {
                    return Err(TypeError::new(
                        format!("/apply/arg{i}"),
                        format!("formula of type {}", ty.fibre),
                        at.to_string(),
                    ));
                }
            }
            Ok(ty.fibre)
        }
    }
}
