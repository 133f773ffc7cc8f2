use super::coalgebra::Coalgebra;
use super::structure::{state_map, Lifting, StateSet, Structure, SubsetPred, ValueMap};
use super::value::{FunctorValue, StateId};
use crate::error::{EvalError, TypeError};
use crate::par::Exec;
use crate::signature::FibObject;
use crate::syntax::{type_of_formula, type_of_modality, Formula, ModalityExpr, ModalityType};

#[derive(Clone)]
enum CMod {
    Base(Lifting),
    Neg(Box<CMod>),
    Conj(Vec<CMod>),
    Sup(Box<CMod>, ValueMap),
    Then(Box<CMod>, Box<CMod>),
    Weaken(Box<CMod>, usize),
}

/// Subset of an intermediate functor space given by a modality's lifting.
struct ThenPred<'a> {
    first: &'a CMod,
    args: &'a [&'a dyn SubsetPred],
}

impl SubsetPred for ThenPred<'_> {
    fn contains(&self, w: &FunctorValue) -> Result<bool, EvalError> {
        self.first.member(self.args, w)
    }
}

impl CMod {
    fn member(&self, args: &[&dyn SubsetPred], v: &FunctorValue) -> Result<bool, EvalError> {
        match self {
            CMod::Base(l) => l.member(args, v),
            CMod::Neg(inner) => Ok(!inner.member(args, v)?),
            CMod::Conj(items) => {
                for m in items {
                    if !m.member(args, v)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CMod::Sup(inner, f) => inner.member(args, &f(v)?),
            CMod::Then(first, second) => {
                let w = ThenPred { first, args };
                second.member(&[&w], v)
            }
            CMod::Weaken(inner, index) => {
                let arg = args.get(*index).ok_or_else(|| EvalError::shape(format!("argument {index}"), "none"))?;
                inner.member(&[*arg], v)
            }
        }
    }
}

fn compile_mod(e: &ModalityExpr, st: &Structure) -> Result<CMod, EvalError> {
    Ok(match e {
        ModalityExpr::Base { symbol, params, .. } => CMod::Base(st.lifting(symbol, params)?),
        ModalityExpr::Neg(inner) => CMod::Neg(Box::new(compile_mod(inner, st)?)),
        ModalityExpr::Conj(items) => CMod::Conj(items.iter().map(|m| compile_mod(m, st)).collect::<Result<_, _>>()?),
        ModalityExpr::Superscript(inner, f) => CMod::Sup(Box::new(compile_mod(inner, st)?), st.morphism_map(f)?),
        ModalityExpr::Then(first, second) => {
            CMod::Then(Box::new(compile_mod(first, st)?), Box::new(compile_mod(second, st)?))
        }
        ModalityExpr::Weaken { inner, index, .. } => CMod::Weaken(Box::new(compile_mod(inner, st)?), *index),
    })
}

/// A modality expression with its liftings and morphisms resolved.
#[derive(Clone)]
pub struct CompiledModality {
    expr: CMod,
    ty: ModalityType,
}

impl CompiledModality {
    pub fn compile(e: &ModalityExpr, st: &Structure) -> Result<Self, EvalError> {
        let ty = type_of_modality(e, st.signature())?;
        Ok(Self {
            expr: compile_mod(e, st)?,
            ty,
        })
    }

    pub fn ty(&self) -> &ModalityType {
        &self.ty
    }

    /// Whether `v ∈ ⟦e⟧(U₁, …, Uₐ)`.
    pub fn member(&self, args: &[&dyn SubsetPred], v: &FunctorValue) -> Result<bool, EvalError> {
        if args.len() != self.ty.arity {
            return Err(EvalError::shape(
                format!("{} subset argument(s)", self.ty.arity),
                args.len().to_string(),
            ));
        }
        self.expr.member(args, v)
    }
}

/// Membership of `v` in the lifting denoted by `e` applied to `args`.
pub fn eval_lifting(
    e: &ModalityExpr,
    st: &Structure,
    args: &[&dyn SubsetPred],
    v: &FunctorValue,
) -> Result<bool, EvalError> {
    CompiledModality::compile(e, st)?.member(args, v)
}

#[derive(Clone)]
enum CForm {
    Top,
    Neg(Box<CForm>),
    Conj(Vec<CForm>),
    Adapt(ValueMap, Box<CForm>),
    Apply(CMod, Vec<CForm>),
}

fn compile_form(phi: &Formula, st: &Structure) -> Result<CForm, EvalError> {
    Ok(match phi {
        Formula::Top(_) => CForm::Top,
        Formula::Neg(inner) => CForm::Neg(Box::new(compile_form(inner, st)?)),
        Formula::Conj(items) => CForm::Conj(items.iter().map(|x| compile_form(x, st)).collect::<Result<_, _>>()?),
        Formula::Adapt(f, inner) => CForm::Adapt(st.morphism_map(f)?, Box::new(compile_form(inner, st)?)),
        Formula::Apply(m, args) => CForm::Apply(
            compile_mod(m, st)?,
            args.iter().map(|x| compile_form(x, st)).collect::<Result<_, _>>()?,
        ),
    })
}

/// A type-checked formula with its liftings and morphisms resolved.
#[derive(Clone)]
pub struct CompiledFormula {
    form: CForm,
    fibre: FibObject,
}

/// Three-valued truth over a carrier; `None` marks states whose verdict
/// depends on successors outside a closed carrier.
pub type Verdicts = Vec<Option<bool>>;

struct VerdictSet<'a>(&'a [Option<bool>]);

impl SubsetPred for VerdictSet<'_> {
    fn contains(&self, v: &FunctorValue) -> Result<bool, EvalError> {
        let y = v.as_base()?;
        match self.0.get(y) {
            Some(Some(b)) => Ok(*b),
            Some(None) => Err(EvalError::Undetermined(y)),
            None => Err(EvalError::StateOutOfRange(y)),
        }
    }
}

fn eval_global(form: &CForm, gamma: &[FunctorValue], exec: Exec) -> Result<Verdicts, EvalError> {
    let n = gamma.len();
    Ok(match form {
        CForm::Top => vec![Some(true); n],
        CForm::Neg(inner) => eval_global(inner, gamma, exec)?.into_iter().map(|b| b.map(|b| !b)).collect(),
        CForm::Conj(items) => {
            let mut acc = vec![Some(true); n];
            for item in items {
                let t = eval_global(item, gamma, exec)?;
                for (a, b) in acc.iter_mut().zip(t) {
                    *a = match (*a, b) {
                        (Some(false), _) | (_, Some(false)) => Some(false),
                        (Some(true), Some(true)) => Some(true),
                        _ => None,
                    };
                }
            }
            acc
        }
        CForm::Adapt(f, inner) => {
            let mapped = exec.try_map_range(n, |x| f(&gamma[x]))?;
            eval_global(inner, &mapped, exec)?
        }
        CForm::Apply(m, args) => {
            let truths = args
                .iter()
                .map(|a| eval_global(a, gamma, exec))
                .collect::<Result<Vec<_>, _>>()?;
            let sets: Vec<VerdictSet<'_>> = truths.iter().map(|t| VerdictSet(t)).collect();
            let results = exec.map_range(n, |x| {
                let preds: Vec<&dyn SubsetPred> = sets.iter().map(|s| s as &dyn SubsetPred).collect();
                match m.member(&preds, &gamma[x]) {
                    Ok(b) => Ok(Some(b)),
                    Err(e) if e.is_horizon() => Ok(None),
                    Err(e) => Err(e),
                }
            });
            results.into_iter().collect::<Result<Vec<_>, _>>()?
        }
    })
}

/// Demand-driven evaluation at a single state.
struct LocalPred<'a> {
    form: &'a CForm,
    step: &'a dyn Fn(StateId) -> Result<FunctorValue, EvalError>,
}

impl SubsetPred for LocalPred<'_> {
    fn contains(&self, v: &FunctorValue) -> Result<bool, EvalError> {
        holds_local(self.form, self.step, v.as_base()?)
    }
}

fn holds_local(
    form: &CForm,
    step: &dyn Fn(StateId) -> Result<FunctorValue, EvalError>,
    x: StateId,
) -> Result<bool, EvalError> {
    match form {
        CForm::Top => Ok(true),
        CForm::Neg(inner) => Ok(!holds_local(inner, step, x)?),
        CForm::Conj(items) => {
            for item in items {
                if !holds_local(item, step, x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        CForm::Adapt(f, inner) => {
            let adapted = |y: StateId| f(&step(y)?);
            holds_local(inner, &adapted, x)
        }
        CForm::Apply(m, args) => {
            let preds: Vec<LocalPred<'_>> = args.iter().map(|form| LocalPred { form, step }).collect();
            let refs: Vec<&dyn SubsetPred> = preds.iter().map(|p| p as &dyn SubsetPred).collect();
            m.member(&refs, &step(x)?)
        }
    }
}

impl CompiledFormula {
    pub fn compile(phi: &Formula, st: &Structure) -> Result<Self, EvalError> {
        let fibre = type_of_formula(phi, st.signature())?;
        Ok(Self {
            form: compile_form(phi, st)?,
            fibre,
        })
    }

    pub fn fibre(&self) -> &FibObject {
        &self.fibre
    }

    fn check_fibre(&self, c: &Coalgebra, st: &Structure) -> Result<(), EvalError> {
        let fibre = st
            .signature()
            .expand_object(c.fibre())
            .map_err(|msg| TypeError::new("", "declared coalgebra type", msg))?;
        if fibre != self.fibre {
            return Err(TypeError::new("", format!("formula of type {fibre}"), self.fibre.to_string()).into());
        }
        Ok(())
    }

    /// Per-state verdicts over the whole carrier.
    pub fn verdicts(&self, st: &Structure, c: &Coalgebra, exec: Exec) -> Result<Verdicts, EvalError> {
        self.check_fibre(c, st)?;
        eval_global(&self.form, c.gamma(), exec)
    }

    /// The satisfying subset; fails if some verdict is undetermined.
    pub fn eval(&self, st: &Structure, c: &Coalgebra, exec: Exec) -> Result<StateSet, EvalError> {
        let v = self.verdicts(st, c, exec)?;
        let mut members = Vec::with_capacity(v.len());
        for (x, b) in v.into_iter().enumerate() {
            members.push(b.ok_or(EvalError::Undetermined(x))?);
        }
        Ok(StateSet::from_members(members))
    }

    /// Evaluates at one state, unfolding the structure map only where the
    /// formula demands it.
    pub fn holds(&self, step: &dyn Fn(StateId) -> Result<FunctorValue, EvalError>, x: StateId) -> Result<bool, EvalError> {
        holds_local(&self.form, step, x)
    }
}

/// `⟦φ⟧_{X,γ}` as an explicit subset of the carrier.
pub fn eval_formula(phi: &Formula, st: &Structure, c: &Coalgebra) -> Result<StateSet, EvalError> {
    eval_formula_with(phi, st, c, Exec::default())
}

pub fn eval_formula_with(phi: &Formula, st: &Structure, c: &Coalgebra, exec: Exec) -> Result<StateSet, EvalError> {
    CompiledFormula::compile(phi, st)?.eval(st, c, exec)
}

/// Demand-driven truth of `φ` at state `x` of `c`.
pub fn holds(phi: &Formula, st: &Structure, c: &Coalgebra, x: StateId) -> Result<bool, EvalError> {
    let compiled = CompiledFormula::compile(phi, st)?;
    compiled.check_fibre(c, st)?;
    let step = |y: StateId| c.step(y).cloned();
    compiled.holds(&step, x)
}

/// Checks that `h` is a homomorphism `c1 → c2` and that `⟦φ⟧_{c1}` is the
/// `h`-preimage of `⟦φ⟧_{c2}`.
pub fn check_homomorphism_invariance(
    phi: &Formula,
    st: &Structure,
    c1: &Coalgebra,
    c2: &Coalgebra,
    h: &[StateId],
) -> Result<bool, EvalError> {
    check_homomorphism(st, c1, c2, h)?;
    let compiled = CompiledFormula::compile(phi, st)?;
    let s1 = compiled.eval(st, c1, Exec::default())?;
    let s2 = compiled.eval(st, c2, Exec::default())?;
    Ok(s1 == s2.preimage(h))
}

/// Fails with [`EvalError::NotHomomorphism`] unless
/// `⟦A⟧(h)(γ₁(x)) = γ₂(h(x))` for every state `x` of `c1`.
pub fn check_homomorphism(st: &Structure, c1: &Coalgebra, c2: &Coalgebra, h: &[StateId]) -> Result<(), EvalError> {
    if h.len() != c1.len() {
        return Err(EvalError::shape(format!("map on {} states", c1.len()), format!("{} entries", h.len())));
    }
    if let Some(&y) = h.iter().find(|&&y| y >= c2.len()) {
        return Err(EvalError::StateOutOfRange(y));
    }
    let lifted = st.lift_map(c1.fibre(), state_map(h))?;
    for x in 0..c1.len() {
        let image = lifted(&c1.gamma()[x])?;
        if !image.approx_eq(&c2.gamma()[h[x]], st.eps()) {
            return Err(EvalError::NotHomomorphism(c1.name(x).to_string()));
        }
    }
    Ok(())
}
