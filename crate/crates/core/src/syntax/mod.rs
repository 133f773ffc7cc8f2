//! Typed modality expressions and formulae, their typing rules, the
//! adaptation-eliminating translation, and the text syntax.

mod ast;
mod parse;
mod translate;
mod typing;

pub use ast::{Formula, ModalityExpr};
pub use parse::{
    dreq_expr, parse_formula, parse_formula_at, parse_modality, parse_morphism, polyadic_expr,
    projcert_expr, qdcert_expr, qdeq_expr,
};
pub use translate::{eliminate_adaptations, translate};
pub use typing::{type_of_formula, type_of_modality, ModalityType};
