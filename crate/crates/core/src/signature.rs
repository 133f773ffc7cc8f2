//! Fibred modal signatures.
//!
//! The signature category is presented freely: objects are words over object
//! generators (tensor is concatenation, the empty word is the unit) and
//! morphisms are terms built from named generators, identities, composition
//! and tensor. Each object carries its own modal signature of basic modality
//! symbols; signatures at distinct objects must be disjoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::TypeError;

/// An object of the free strict monoidal category: a word of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FibObject {
    word: Vec<String>,
}

impl FibObject {
    /// The monoidal unit (empty word).
    pub fn unit() -> Self {
        Self { word: Vec::new() }
    }

    pub fn generator(name: impl Into<String>) -> Self {
        Self {
            word: vec![name.into()],
        }
    }

    pub fn from_word<I, S>(word: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            word: word.into_iter().map(Into::into).collect(),
        }
    }

    pub fn word(&self) -> &[String] {
        &self.word
    }

    pub fn is_unit(&self) -> bool {
        self.word.is_empty()
    }

    /// `self ⊗ other`; the outer functor comes first.
    pub fn tensor(&self, other: &FibObject) -> FibObject {
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        FibObject { word }
    }
}

impl fmt::Display for FibObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            f.write_str("I")
        } else {
            f.write_str(&self.word.join("*"))
        }
    }
}

pub fn tensor_objects(a: &FibObject, b: &FibObject) -> FibObject {
    a.tensor(b)
}

/// Parameter attached to a modality symbol or morphism generator, e.g. the
/// probability in `deq[0.5]` or the observable in `ev[Z]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Num(f64),
    Name(String),
}

impl Param {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Param::Num(x) => Some(*x),
            Param::Name(_) => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Param::Name(s) => Some(s),
            Param::Num(_) => None,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Num(x) => write!(f, "{x}"),
            Param::Name(s) => f.write_str(s),
        }
    }
}

pub(crate) fn fmt_params(f: &mut fmt::Formatter<'_>, params: &[Param]) -> fmt::Result {
    if params.is_empty() {
        return Ok(());
    }
    f.write_str("[")?;
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str("]")
}

/// Reference to a (possibly parameterised) morphism generator.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismRef {
    pub name: String,
    pub params: Vec<Param>,
}

impl MorphismRef {
    pub fn new(name: impl Into<String>, params: Vec<Param>) -> Self {
        Self {
            name: name.into(),
            params,
        }
    }

    pub fn plain(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }
}

impl fmt::Display for MorphismRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        fmt_params(f, &self.params)
    }
}

/// A morphism of the free signature category.
#[derive(Clone, Debug, PartialEq)]
pub enum FibMorphism {
    Id(FibObject),
    Gen(MorphismRef),
    /// `Compose(g, f)` is `g ∘ f`: apply `f` first.
    Compose(Box<FibMorphism>, Box<FibMorphism>),
    Tensor(Box<FibMorphism>, Box<FibMorphism>),
}

impl FibMorphism {
    pub fn gen(name: impl Into<String>, params: Vec<Param>) -> Self {
        FibMorphism::Gen(MorphismRef::new(name, params))
    }

    pub fn id(obj: FibObject) -> Self {
        FibMorphism::Id(obj)
    }

    pub fn tensor(f: FibMorphism, g: FibMorphism) -> Self {
        FibMorphism::Tensor(Box::new(f), Box::new(g))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, FibMorphism::Id(_))
    }

    /// Flattened normal form: composition chains are flattened (in
    /// application order), identities are dropped, and tensor factors are
    /// normalised recursively.
    pub fn normal_form(&self) -> NormalMorphism {
        let mut factors = Vec::new();
        self.collect_factors(&mut factors);
        NormalMorphism { factors }
    }

    fn collect_factors(&self, out: &mut Vec<NormalFactor>) {
        match self {
            FibMorphism::Id(_) => {}
            FibMorphism::Gen(r) => out.push(NormalFactor::Gen(r.clone())),
            FibMorphism::Compose(g, f) => {
                f.collect_factors(out);
                g.collect_factors(out);
            }
            FibMorphism::Tensor(a, b) => {
                let na = a.normal_form();
                let nb = b.normal_form();
                if na.factors.is_empty() && nb.factors.is_empty() {
                    return;
                }
                out.push(NormalFactor::Tensor(
                    na,
                    nb,
                    morphism_source_hint(a),
                    morphism_source_hint(b),
                ));
            }
        }
    }
}

// Identities inside a tensor still determine which object is whiskered, so
// the normal form keeps the identity object for empty sides.
fn morphism_source_hint(m: &FibMorphism) -> Option<FibObject> {
    match m {
        FibMorphism::Id(o) => Some(o.clone()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalFactor {
    Gen(MorphismRef),
    Tensor(NormalMorphism, NormalMorphism, Option<FibObject>, Option<FibObject>),
}

/// Free-term normal form used for syntactic morphism equality.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalMorphism {
    pub factors: Vec<NormalFactor>,
}

impl fmt::Display for FibMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FibMorphism::Id(o) => write!(f, "id[{o}]"),
            FibMorphism::Gen(r) => write!(f, "{r}"),
            FibMorphism::Compose(g, h) => write!(f, "({g} . {h})"),
            FibMorphism::Tensor(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

/// A basic modality symbol. Parameters are supplied at use sites; the symbol
/// names a whole family (e.g. `deq` for every probability).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModalitySymbol {
    pub name: String,
    pub arity: usize,
}

impl ModalitySymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }
}

type MorphismTyper =
    Arc<dyn Fn(&[Param]) -> Result<(FibObject, FibObject), String> + Send + Sync>;

/// How a morphism generator family is typed.
#[derive(Clone)]
pub enum MorphismTyping {
    /// Same source and target for every parameter choice.
    Fixed { source: FibObject, target: FibObject },
    /// Source and target depend on the parameters (e.g. `bits[1,2]`).
    Dependent(MorphismTyper),
}

impl fmt::Debug for MorphismTyping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismTyping::Fixed { source, target } => write!(f, "{source} -> {target}"),
            MorphismTyping::Dependent(_) => f.write_str("<dependent>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The same modality name is declared at two different objects.
    OverlappingModality {
        name: String,
        fibres: Vec<FibObject>,
    },
    UndeclaredObject {
        context: String,
        generator: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OverlappingModality { name, fibres } => {
                let list: Vec<String> = fibres.iter().map(|o| o.to_string()).collect();
                write!(f, "modality `{name}` declared at several objects: {}", list.join(", "))
            }
            Violation::UndeclaredObject { context, generator } => {
                write!(f, "{context} references undeclared object generator `{generator}`")
            }
        }
    }
}

/// A fibred modal signature.
#[derive(Clone, Debug, Default)]
pub struct FibredSignature {
    objects: BTreeSet<String>,
    aliases: BTreeMap<String, FibObject>,
    morphisms: BTreeMap<String, MorphismTyping>,
    modalities: BTreeMap<FibObject, BTreeSet<ModalitySymbol>>,
}

impl FibredSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> &mut Self {
        self.objects.insert(name.into());
        self
    }

    /// Registers a name that abbreviates a whole word, e.g. `Q8 = S8*D*R`.
    pub fn add_alias(&mut self, name: impl Into<String>, word: FibObject) -> &mut Self {
        self.aliases.insert(name.into(), word);
        self
    }

    pub fn add_morphism(
        &mut self,
        name: impl Into<String>,
        source: FibObject,
        target: FibObject,
    ) -> &mut Self {
        self.morphisms
            .insert(name.into(), MorphismTyping::Fixed { source, target });
        self
    }

    pub fn add_morphism_family<F>(&mut self, name: impl Into<String>, typer: F) -> &mut Self
    where
        F: Fn(&[Param]) -> Result<(FibObject, FibObject), String> + Send + Sync + 'static,
    {
        self.morphisms
            .insert(name.into(), MorphismTyping::Dependent(Arc::new(typer)));
        self
    }

    pub fn add_modality(&mut self, fibre: FibObject, symbol: ModalitySymbol) -> &mut Self {
        self.modalities.entry(fibre).or_default().insert(symbol);
        self
    }

    pub fn has_object(&self, name: &str) -> bool {
        self.objects.contains(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = &str> {
        self.objects.iter().map(String::as_str)
    }

    pub fn alias(&self, name: &str) -> Option<&FibObject> {
        self.aliases.get(name)
    }

    pub fn has_morphism(&self, name: &str) -> bool {
        self.morphisms.contains_key(name)
    }

    pub fn modal_signature(&self, fibre: &FibObject) -> impl Iterator<Item = &ModalitySymbol> {
        self.modalities.get(fibre).into_iter().flatten()
    }

    /// Every `(fibre, symbol)` pair declaring `name`.
    pub fn lookup_modality(&self, name: &str) -> Vec<(&FibObject, &ModalitySymbol)> {
        self.modalities
            .iter()
            .flat_map(|(fibre, set)| set.iter().map(move |s| (fibre, s)))
            .filter(|(_, s)| s.name == name)
            .collect()
    }

    /// Expands a word whose letters may be aliases into generator letters.
    pub fn expand_object(&self, obj: &FibObject) -> Result<FibObject, String> {
        let mut word = Vec::new();
        for letter in obj.word() {
            if self.objects.contains(letter) {
                word.push(letter.clone());
            } else if let Some(w) = self.aliases.get(letter) {
                word.extend(w.word().iter().cloned());
            } else {
                return Err(format!("undeclared object `{letter}`"));
            }
        }
        Ok(FibObject { word })
    }

    /// Source and target of a morphism generator instance.
    pub fn generator_type(&self, r: &MorphismRef) -> Result<(FibObject, FibObject), TypeError> {
        match self.morphisms.get(&r.name) {
            None => Err(TypeError::new(
                "",
                "declared morphism generator",
                format!("undeclared morphism `{}`", r.name),
            )),
            Some(MorphismTyping::Fixed { source, target }) => Ok((source.clone(), target.clone())),
            Some(MorphismTyping::Dependent(typer)) => {
                typer(&r.params).map_err(|e| TypeError::new("", format!("valid parameters for `{}`", r.name), e))
            }
        }
    }

    /// Source and target of an arbitrary morphism term.
    pub fn morphism_type(&self, m: &FibMorphism) -> Result<(FibObject, FibObject), TypeError> {
        match m {
            FibMorphism::Id(o) => {
                let o = self
                    .expand_object(o)
                    .map_err(|e| TypeError::new("", "declared object", e))?;
                Ok((o.clone(), o))
            }
            FibMorphism::Gen(r) => self.generator_type(r),
            FibMorphism::Compose(g, f) => {
                let (fs, ft) = self.morphism_type(f)?;
                let (gs, gt) = self.morphism_type(g)?;
                if ft != gs {
                    return Err(TypeError::new(
                        "",
                        format!("composable morphisms (source of `{g}` = {ft})"),
                        format!("`{g}` has source {gs}"),
                    ));
                }
                Ok((fs, gt))
            }
            FibMorphism::Tensor(a, b) => {
                let (as_, at) = self.morphism_type(a)?;
                let (bs, bt) = self.morphism_type(b)?;
                Ok((as_.tensor(&bs), at.tensor(&bt)))
            }
        }
    }

    /// `g ∘ f`, checking that the target of `f` is the source of `g`.
    /// Identities are absorbed.
    pub fn compose_morphisms(
        &self,
        g: &FibMorphism,
        f: &FibMorphism,
    ) -> Result<FibMorphism, TypeError> {
        let (_, ft) = self.morphism_type(f)?;
        let (gs, _) = self.morphism_type(g)?;
        if ft != gs {
            return Err(TypeError::new(
                "",
                format!("morphism with source {ft}"),
                format!("`{g}` with source {gs}"),
            ));
        }
        Ok(match (g, f) {
            (FibMorphism::Id(_), _) => f.clone(),
            (_, FibMorphism::Id(_)) => g.clone(),
            _ => FibMorphism::Compose(Box::new(g.clone()), Box::new(f.clone())),
        })
    }
}

pub fn compose_morphisms(
    sig: &FibredSignature,
    g: &FibMorphism,
    f: &FibMorphism,
) -> Result<FibMorphism, TypeError> {
    sig.compose_morphisms(g, f)
}

/// Lists every violation of the well-formedness conditions: pairwise
/// disjoint modal signatures and declared objects everywhere.
pub fn validate_signature(sig: &FibredSignature) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut by_name: BTreeMap<&str, Vec<FibObject>> = BTreeMap::new();
    for (fibre, set) in &sig.modalities {
        for s in set {
            let entry = by_name.entry(&s.name).or_default();
            if !entry.contains(fibre) {
                entry.push(fibre.clone());
            }
        }
    }
    for (name, fibres) in by_name {
        if fibres.len() > 1 {
            out.push(Violation::OverlappingModality {
                name: name.to_string(),
                fibres,
            });
        }
    }

    let mut check_word = |context: String, obj: &FibObject| {
        for letter in obj.word() {
            if !sig.objects.contains(letter) && !sig.aliases.contains_key(letter) {
                out.push(Violation::UndeclaredObject {
                    context: context.clone(),
                    generator: letter.clone(),
                });
            }
        }
    };
    for fibre in sig.modalities.keys() {
        check_word(format!("modal signature at {fibre}"), fibre);
    }
    for (name, word) in &sig.aliases {
        check_word(format!("alias `{name}`"), word);
    }
    for (name, typing) in &sig.morphisms {
        if let MorphismTyping::Fixed { source, target } = typing {
            check_word(format!("morphism `{name}`"), source);
            check_word(format!("morphism `{name}`"), target);
        }
    }
    out
}
