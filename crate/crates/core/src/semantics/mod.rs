//! Structures, runtime functor values, predicate liftings and the
//! evaluation of modality expressions and formulae on finite coalgebras.

mod coalgebra;
mod eval;
mod props;
mod structure;
mod value;

pub use coalgebra::Coalgebra;
pub use eval::{
    check_homomorphism, check_homomorphism_invariance, eval_formula, eval_formula_with, eval_lifting, holds,
    CompiledFormula, CompiledModality, Verdicts,
};
pub use props::{check_property, PropertyCheck, PropertyReport};
pub use structure::{
    apply_nat_trans, compose_fmap, identity_map, map_functor, state_map, DistInterp, ExponentInterp, FnPred,
    FunctorInterp, LabelInterp, Lifting, LiftingFamily, MemberFn, NatFamily, NatTrans, PowersetInterp,
    ProductInterp, StateSet, Structure, SubsetPred, ValueMap,
};
pub use value::{FunctorValue, Key, Label, LazyTable, Lookup, ObjKey, StateId, Table, DIST_TOLERANCE};
