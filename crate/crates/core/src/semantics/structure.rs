use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::value::{FunctorValue, Table};
use crate::error::EvalError;
use crate::signature::{FibMorphism, FibObject, FibredSignature, ModalitySymbol, Param};

/// A function between functor spaces, `⟦A⟧(X) → ⟦B⟧(Y)`.
pub type ValueMap = Arc<dyn Fn(&FunctorValue) -> Result<FunctorValue, EvalError> + Send + Sync>;

pub fn identity_map() -> ValueMap {
    Arc::new(|v: &FunctorValue| Ok(v.clone()))
}

/// The function on base carriers induced by an index map `h: X → Y`.
pub fn state_map(h: &[usize]) -> ValueMap {
    let h = h.to_vec();
    Arc::new(move |v: &FunctorValue| {
        let x = v.as_base()?;
        h.get(x)
            .map(|&y| FunctorValue::Base(y))
            .ok_or(EvalError::StateOutOfRange(x))
    })
}

/// Action of a functor generator on functions.
pub trait FunctorInterp: Send + Sync {
    fn name(&self) -> &str;

    /// `F(f)(v)`.
    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError>;
}

/// `F₁(F₂(…Fₖ(h)))` for the composite `F₁∘…∘Fₖ`.
pub fn compose_fmap(interps: &[Arc<dyn FunctorInterp>], h: ValueMap) -> ValueMap {
    let mut m = h;
    for interp in interps.iter().rev() {
        let inner = m;
        let interp = Arc::clone(interp);
        m = Arc::new(move |v: &FunctorValue| interp.fmap(v, &inner));
    }
    m
}

/// Finite powerset `P`.
pub struct PowersetInterp;

impl FunctorInterp for PowersetInterp {
    fn name(&self) -> &str {
        "powerset"
    }

    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError> {
        match v {
            FunctorValue::Set(items) => Ok(FunctorValue::set(
                items.iter().map(|x| f(x)).collect::<Result<Vec<_>, _>>()?,
            )),
            other => Err(EvalError::shape("set", other.kind())),
        }
    }
}

/// Finitely supported distributions `D`; masses of merged points add up.
pub struct DistInterp;

impl FunctorInterp for DistInterp {
    fn name(&self) -> &str {
        "distribution"
    }

    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError> {
        match v {
            FunctorValue::Dist(entries) => Ok(FunctorValue::merged_dist(
                entries
                    .iter()
                    .map(|(x, p)| Ok((f(x)?, *p)))
                    .collect::<Result<Vec<_>, EvalError>>()?,
            )),
            other => Err(EvalError::shape("distribution", other.kind())),
        }
    }
}

/// Labelled pairs `Σ × (−)`.
pub struct LabelInterp;

impl FunctorInterp for LabelInterp {
    fn name(&self) -> &str {
        "label"
    }

    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError> {
        match v {
            FunctorValue::Pair(l, x) => Ok(FunctorValue::pair(l.clone(), f(x)?)),
            other => Err(EvalError::shape("labelled pair", other.kind())),
        }
    }
}

/// Exponent `(−)^K`, over a finite key set or an open one (lazy tables).
pub struct ExponentInterp {
    name: String,
}

impl ExponentInterp {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into() }
    }
}

impl FunctorInterp for ExponentInterp {
    fn name(&self) -> &str {
        &self.name
    }

    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError> {
        match v {
            FunctorValue::Table(Table::Finite(entries)) => Ok(FunctorValue::Table(Table::Finite(
                entries
                    .iter()
                    .map(|(k, x)| Ok((k.clone(), f(x)?)))
                    .collect::<Result<Vec<_>, EvalError>>()?,
            ))),
            FunctorValue::Table(Table::Lazy(t)) => {
                let t = t.clone();
                let f = Arc::clone(f);
                Ok(FunctorValue::lazy(Arc::new(move |k| f(&t.get(k)?))))
            }
            other => Err(EvalError::shape("table", other.kind())),
        }
    }
}

/// Finite product `∏ᵢ Fᵢ`, each factor itself a composite of generators.
pub struct ProductInterp {
    name: String,
    factors: Vec<Vec<Arc<dyn FunctorInterp>>>,
}

impl ProductInterp {
    pub fn new(name: impl Into<String>, factors: Vec<Vec<Arc<dyn FunctorInterp>>>) -> Self {
        Self {
            name: name.into(),
            factors,
        }
    }
}

impl FunctorInterp for ProductInterp {
    fn name(&self) -> &str {
        &self.name
    }

    fn fmap(&self, v: &FunctorValue, f: &ValueMap) -> Result<FunctorValue, EvalError> {
        match v {
            FunctorValue::Tuple(items) if items.len() == self.factors.len() => Ok(FunctorValue::Tuple(
                items
                    .iter()
                    .zip(&self.factors)
                    .map(|(x, factor)| compose_fmap(factor, Arc::clone(f))(x))
                    .collect::<Result<_, _>>()?,
            )),
            FunctorValue::Tuple(items) => Err(EvalError::shape(
                format!("{}-tuple", self.factors.len()),
                format!("{}-tuple", items.len()),
            )),
            other => Err(EvalError::shape("tuple", other.kind())),
        }
    }
}

/// A decidable subset of some functor space.
pub trait SubsetPred {
    fn contains(&self, v: &FunctorValue) -> Result<bool, EvalError>;
}

/// Explicit subset of a finite carrier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StateSet {
    members: Vec<bool>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        Self {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: vec![true; n],
        }
    }

    pub fn from_members(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in ids {
            s.members[i] = true;
        }
        s
    }

    /// The subset with bit `i` of `mask` set iff state `i` is a member.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            members: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_state(&self, x: usize) -> bool {
        self.members.get(x).copied().unwrap_or(false)
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|b| !b).collect(),
        }
    }

    pub fn intersect(&self, other: &StateSet) -> Self {
        Self {
            members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.members.iter().zip(&other.members).all(|(a, b)| !a || *b)
    }

    /// `h⁻¹(self)` for `h: X → Y` given as an index map.
    pub fn preimage(&self, h: &[usize]) -> StateSet {
        Self {
            members: h.iter().map(|&y| self.contains_state(y)).collect(),
        }
    }
}

impl SubsetPred for StateSet {
    fn contains(&self, v: &FunctorValue) -> Result<bool, EvalError> {
        let x = v.as_base()?;
        if x < self.members.len() {
            Ok(self.members[x])
        } else {
            Err(EvalError::StateOutOfRange(x))
        }
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.ids().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", ids.join(", "))
    }
}

/// Subset given by a membership closure.
pub struct FnPred<F>(pub F);

impl<F> SubsetPred for FnPred<F>
where
    F: Fn(&FunctorValue) -> Result<bool, EvalError>,
{
    fn contains(&self, v: &FunctorValue) -> Result<bool, EvalError> {
        (self.0)(v)
    }
}

pub type MemberFn =
    Arc<dyn Fn(&[&dyn SubsetPred], &FunctorValue) -> Result<bool, EvalError> + Send + Sync>;

/// A predicate lifting, given by its membership test: whether a value lies
/// in the lifting of a family of subsets of the carrier.
#[derive(Clone)]
pub struct Lifting {
    pub name: String,
    pub arity: usize,
    pub fibre: FibObject,
    member: MemberFn,
}

impl Lifting {
    pub fn new<F>(name: impl Into<String>, arity: usize, fibre: FibObject, member: F) -> Self
    where
        F: Fn(&[&dyn SubsetPred], &FunctorValue) -> Result<bool, EvalError> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            arity,
            fibre,
            member: Arc::new(member),
        }
    }

    pub fn member(&self, args: &[&dyn SubsetPred], v: &FunctorValue) -> Result<bool, EvalError> {
        if args.len() != self.arity {
            return Err(EvalError::shape(
                format!("{} subset argument(s) for `{}`", self.arity, self.name),
                format!("{}", args.len()),
            ));
        }
        (self.member)(args, v)
    }
}

impl fmt::Debug for Lifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lifting({} : {}^{})", self.name, self.fibre, self.arity)
    }
}

/// The component of a natural transformation, generic in the carrier.
#[derive(Clone)]
pub struct NatTrans {
    pub source: FibObject,
    pub target: FibObject,
    pub map: ValueMap,
}

impl NatTrans {
    pub fn identity(obj: FibObject) -> Self {
        Self {
            source: obj.clone(),
            target: obj,
            map: identity_map(),
        }
    }

    pub fn apply(&self, v: &FunctorValue) -> Result<FunctorValue, EvalError> {
        (self.map)(v)
    }
}

pub fn apply_nat_trans(n: &NatTrans, v: &FunctorValue) -> Result<FunctorValue, EvalError> {
    n.apply(v)
}

pub type NatFamily = Arc<dyn Fn(&[Param]) -> Result<ValueMap, EvalError> + Send + Sync>;
pub type LiftingFamily = Arc<dyn Fn(&[Param], f64) -> Result<Lifting, EvalError> + Send + Sync>;

/// Interpretation of a fibred signature: functors for object generators,
/// natural transformations for morphism generators and predicate liftings
/// for modality symbols. Words are interpreted as composites, outermost
/// generator first.
#[derive(Clone)]
pub struct Structure {
    sig: FibredSignature,
    functors: BTreeMap<String, Arc<dyn FunctorInterp>>,
    nats: BTreeMap<String, NatFamily>,
    liftings: BTreeMap<String, LiftingFamily>,
    eps: f64,
}

impl Default for Structure {
    fn default() -> Self {
        Self::new()
    }
}

impl Structure {
    pub fn new() -> Self {
        Self {
            sig: FibredSignature::new(),
            functors: BTreeMap::new(),
            nats: BTreeMap::new(),
            liftings: BTreeMap::new(),
            eps: 1e-9,
        }
    }

    pub fn signature(&self) -> &FibredSignature {
        &self.sig
    }

    /// Tolerance for probability and label comparisons inside liftings.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn set_eps(&mut self, eps: f64) -> &mut Self {
        self.eps = eps;
        self
    }

    pub fn add_functor(&mut self, name: impl Into<String>, interp: Arc<dyn FunctorInterp>) -> &mut Self {
        let name = name.into();
        self.sig.add_object(name.clone());
        self.functors.insert(name, interp);
        self
    }

    pub fn add_alias(&mut self, name: impl Into<String>, word: FibObject) -> &mut Self {
        self.sig.add_alias(name, word);
        self
    }

    pub fn functor(&self, name: &str) -> Option<&Arc<dyn FunctorInterp>> {
        self.functors.get(name)
    }

    /// A morphism generator with fixed type, interpreted per parameter list.
    pub fn add_nat<F>(&mut self, name: impl Into<String>, source: FibObject, target: FibObject, family: F) -> &mut Self
    where
        F: Fn(&[Param]) -> Result<ValueMap, EvalError> + Send + Sync + 'static,
    {
        let name = name.into();
        self.sig.add_morphism(name.clone(), source, target);
        self.nats.insert(name, Arc::new(family));
        self
    }

    /// A morphism generator whose type depends on its parameters.
    pub fn add_nat_family<T, F>(&mut self, name: impl Into<String>, typer: T, family: F) -> &mut Self
    where
        T: Fn(&[Param]) -> Result<(FibObject, FibObject), String> + Send + Sync + 'static,
        F: Fn(&[Param]) -> Result<ValueMap, EvalError> + Send + Sync + 'static,
    {
        let name = name.into();
        self.sig.add_morphism_family(name.clone(), typer);
        self.nats.insert(name, Arc::new(family));
        self
    }

    pub fn add_lifting<F>(&mut self, fibre: FibObject, symbol: ModalitySymbol, family: F) -> &mut Self
    where
        F: Fn(&[Param], f64) -> Result<Lifting, EvalError> + Send + Sync + 'static,
    {
        self.liftings.insert(symbol.name.clone(), Arc::new(family));
        self.sig.add_modality(fibre, symbol);
        self
    }

    pub fn lifting(&self, name: &str, params: &[Param]) -> Result<Lifting, EvalError> {
        let family = self.liftings.get(name).ok_or_else(|| EvalError::Uninterpreted {
            kind: "modality",
            name: name.to_string(),
        })?;
        family(params, self.eps)
    }

    fn interps(&self, obj: &FibObject) -> Result<Vec<Arc<dyn FunctorInterp>>, EvalError> {
        let word = self
            .sig
            .expand_object(obj)
            .map_err(|msg| EvalError::Uninterpreted { kind: "object", name: msg })?;
        word.word()
            .iter()
            .map(|g| {
                self.functors.get(g).cloned().ok_or_else(|| EvalError::Uninterpreted {
                    kind: "object",
                    name: g.clone(),
                })
            })
            .collect()
    }

    /// `⟦A⟧(h)` as a value map.
    pub fn lift_map(&self, obj: &FibObject, h: ValueMap) -> Result<ValueMap, EvalError> {
        Ok(compose_fmap(&self.interps(obj)?, h))
    }

    /// `⟦f⟧` for a morphism term. Tensors are horizontal composites:
    /// `(f ⊗ g)_X = ⟦B⟧(g_X) ∘ f_{⟦C⟧X}` for `f: A → B`, `g: C → D`.
    pub fn morphism_map(&self, m: &FibMorphism) -> Result<ValueMap, EvalError> {
        match m {
            FibMorphism::Id(_) => Ok(identity_map()),
            FibMorphism::Gen(r) => {
                self.sig.generator_type(r)?;
                let family = self.nats.get(&r.name).ok_or_else(|| EvalError::Uninterpreted {
                    kind: "morphism",
                    name: r.name.clone(),
                })?;
                family(&r.params)
            }
            FibMorphism::Compose(g, f) => {
                let (fm, gm) = (self.morphism_map(f)?, self.morphism_map(g)?);
                Ok(Arc::new(move |v: &FunctorValue| gm(&fm(v)?)))
            }
            FibMorphism::Tensor(a, b) => {
                let (_, a_target) = self.sig.morphism_type(a)?;
                let am = self.morphism_map(a)?;
                let lifted = self.lift_map(&a_target, self.morphism_map(b)?)?;
                Ok(Arc::new(move |v: &FunctorValue| lifted(&am(v)?)))
            }
        }
    }

    pub fn nat_trans(&self, m: &FibMorphism) -> Result<NatTrans, EvalError> {
        let (source, target) = self.sig.morphism_type(m)?;
        Ok(NatTrans {
            source,
            target,
            map: self.morphism_map(m)?,
        })
    }
}

/// `⟦A⟧(h)(v)` for a function `h` between carriers.
pub fn map_functor(obj: &FibObject, st: &Structure, h: &ValueMap, v: &FunctorValue) -> Result<FunctorValue, EvalError> {
    st.lift_map(obj, Arc::clone(h))?(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::value::{Key, Label};

    fn base(x: usize) -> FunctorValue {
        FunctorValue::Base(x)
    }

    fn sample() -> Structure {
        let mut st = Structure::new();
        st.add_functor("P", Arc::new(PowersetInterp))
            .add_functor("D", Arc::new(DistInterp))
            .add_functor("R", Arc::new(LabelInterp));
        st
    }

    #[test]
    fn distribution_pushforward_sums_masses() {
        let st = sample();
        let d = FunctorValue::dist([(base(0), 0.25), (base(1), 0.75)]).unwrap();
        let h = state_map(&[2, 2]);
        let out = map_functor(&FibObject::generator("D"), &st, &h, &d).unwrap();
        assert_eq!(out, FunctorValue::point(base(2)));
    }

    #[test]
    fn pair_relabels_inner_state() {
        let st = sample();
        let v = FunctorValue::pair(Label::Real(1.0), base(0));
        let out = map_functor(&FibObject::generator("R"), &st, &state_map(&[3]), &v).unwrap();
        assert_eq!(out, FunctorValue::pair(Label::Real(1.0), base(3)));
    }

    #[test]
    fn identity_map_is_neutral() {
        let st = sample();
        let v = FunctorValue::dist([
            (FunctorValue::pair(Label::Real(1.0), base(0)), 0.5),
            (FunctorValue::pair(Label::Real(2.0), base(1)), 0.5),
        ])
        .unwrap();
        let obj = FibObject::from_word(["D", "R"]);
        assert_eq!(map_functor(&obj, &st, &identity_map(), &v).unwrap(), v);
        assert_eq!(map_functor(&obj, &st, &state_map(&[0, 1]), &v).unwrap(), v);
    }

    #[test]
    fn tensor_word_maps_innermost_layer() {
        let st = sample();
        let v = FunctorValue::set([FunctorValue::states([0, 1]), FunctorValue::states([1])]);
        let out = map_functor(&FibObject::from_word(["P", "P"]), &st, &state_map(&[0, 0]), &v).unwrap();
        assert_eq!(out, FunctorValue::set([FunctorValue::states([0])]));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let st = sample();
        let v = FunctorValue::table([(Key::sym("a"), base(0))]);
        assert!(matches!(
            map_functor(&FibObject::generator("D"), &st, &identity_map(), &v),
            Err(EvalError::Shape { .. })
        ));
    }
}
