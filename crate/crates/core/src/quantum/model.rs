//! Quantum systems as coalgebras on `Q_n = S_n ⊗ D ⊗ R`.
//!
//! A state's structure map is a lazy table: looking up an observable
//! measures the state and returns a distribution over (outcome, successor)
//! pairs, with successors identified up to global phase in the carrier.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::classical::{add_distributions, add_labels, add_unit_liftings, eval_nat};
use crate::error::{EvalError, QuantumError, TypeError};
use crate::par::Exec;
use crate::semantics::{
    Coalgebra, CompiledFormula, ExponentInterp, FunctorValue, Key, Label, Structure, ValueMap, Verdicts,
};
use crate::signature::{FibMorphism, FibObject, Param};
use crate::syntax::{eliminate_adaptations, type_of_formula, Formula, ModalityExpr};

use super::linalg::{check_positions, CMatrix};
use super::observable::{Observable, MAX_QUBITS};
use super::state::PureState;

pub const DEFAULT_BUDGET: usize = 10_000;

/// `S_n ⊗ D ⊗ R` for an `n`-dimensional state space.
pub fn q_object(dim: usize) -> FibObject {
    FibObject::from_word([format!("S{dim}"), "D".to_string(), "R".to_string()])
}

/// `D ⊗ R`, the fibre of the outcome modalities.
pub fn outcome_object() -> FibObject {
    FibObject::from_word(["D", "R"])
}

const RESERVED: [&str; 3] = ["ev", "U", "bits"];

/// Declared observables, unitaries and named restrictions of a register.
#[derive(Clone, Debug)]
pub struct QuantumSystem {
    qubits: usize,
    observables: BTreeMap<String, Arc<Observable>>,
    unitaries: BTreeMap<String, Arc<CMatrix>>,
    restrictions: BTreeMap<String, Vec<usize>>,
}

impl QuantumSystem {
    pub fn new(qubits: usize) -> Result<Self, QuantumError> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(QuantumError::Invalid(format!(
                "register size {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        Ok(Self {
            qubits,
            observables: BTreeMap::new(),
            unitaries: BTreeMap::new(),
            restrictions: BTreeMap::new(),
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    fn check_fresh(&self, name: &str) -> Result<(), QuantumError> {
        let taken = self.observables.contains_key(name)
            || self.unitaries.contains_key(name)
            || self.restrictions.contains_key(name)
            || RESERVED.contains(&name);
        if taken || name.is_empty() {
            return Err(QuantumError::Invalid(format!("name `{name}` is already in use")));
        }
        Ok(())
    }

    pub fn add_observable(&mut self, obs: Observable) -> Result<&mut Self, QuantumError> {
        self.check_fresh(obs.name())?;
        if obs.qubits() > self.qubits {
            return Err(QuantumError::Dimension {
                expected: self.dim(),
                found: obs.dim(),
            });
        }
        self.observables.insert(obs.name().to_string(), Arc::new(obs));
        Ok(self)
    }

    pub fn add_unitary(&mut self, name: impl Into<String>, u: CMatrix) -> Result<&mut Self, QuantumError> {
        let name = name.into();
        self.check_fresh(&name)?;
        u.require_unitary(1e-10)?;
        if u.qubits().is_none_or(|k| k > self.qubits) {
            return Err(QuantumError::Dimension {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        self.unitaries.insert(name, Arc::new(u));
        Ok(self)
    }

    /// A named morphism `Q_{2^k} → Q_{2^m}` restricting to the listed
    /// 1-based qubits.
    pub fn add_restriction(&mut self, name: impl Into<String>, positions: Vec<usize>) -> Result<&mut Self, QuantumError> {
        let name = name.into();
        self.check_fresh(&name)?;
        check_positions(&positions, self.qubits)?;
        self.restrictions.insert(name, positions);
        Ok(self)
    }

    pub fn observable(&self, name: &str) -> Result<&Arc<Observable>, QuantumError> {
        self.observables.get(name).ok_or_else(|| QuantumError::Unknown {
            kind: "observable",
            name: name.to_string(),
        })
    }

    pub fn observables(&self) -> impl Iterator<Item = &Arc<Observable>> {
        self.observables.values()
    }

    pub fn unitary(&self, name: &str) -> Result<&Arc<CMatrix>, QuantumError> {
        self.unitaries.get(name).ok_or_else(|| QuantumError::Unknown {
            kind: "unitary",
            name: name.to_string(),
        })
    }

    pub fn restriction(&self, name: &str) -> Option<&[usize]> {
        self.restrictions.get(name).map(Vec::as_slice)
    }

    /// The structure with `S2..S32`, `D`, `R`, aliases `Q2..Q32`, the unit
    /// liftings, `deq` and `detcert`, and morphisms `ev[A]`, `U[name]`,
    /// `bits[i1,...]` and the named restrictions.
    pub fn structure(self: &Arc<Self>) -> Structure {
        let mut st = Structure::new();
        add_distributions(&mut st);
        add_labels(&mut st);
        add_unit_liftings(&mut st);
        for k in 1..=MAX_QUBITS {
            let dim = 1usize << k;
            st.add_functor(format!("S{dim}"), Arc::new(ExponentInterp::new(format!("S{dim}"))));
            st.add_alias(format!("Q{dim}"), q_object(dim));
        }

        let sys = Arc::clone(self);
        let sys2 = Arc::clone(self);
        st.add_nat_family(
            "ev",
            move |params| {
                let obs = sys.observable(single_name("ev", params)?).map_err(|e| e.to_string())?;
                Ok((q_object(obs.dim()), outcome_object()))
            },
            move |params| {
                let name = single_name("ev", params).map_err(|e| EvalError::bad_params("ev", e))?;
                let obs = Arc::clone(sys2.observable(name)?);
                Ok(eval_nat(Key::obj(obs.name().to_string(), obs)))
            },
        );

        let sys = Arc::clone(self);
        let sys2 = Arc::clone(self);
        st.add_nat_family(
            "U",
            move |params| {
                let u = sys.unitary(single_name("U", params)?).map_err(|e| e.to_string())?;
                Ok((q_object(u.dim()), q_object(u.dim())))
            },
            move |params| {
                let name = single_name("U", params).map_err(|e| EvalError::bad_params("U", e))?.to_string();
                let u = Arc::clone(sys2.unitary(&name)?);
                Ok(rekey(move |obs: &Observable| obs.conjugate_by(&u, &format!("U[{name}]"))))
            },
        );

        let k = self.qubits;
        st.add_nat_family(
            "bits",
            move |params| {
                let positions = positions_param(params, k)?;
                Ok((q_object(1 << k), q_object(1 << positions.len())))
            },
            move |params| {
                let positions = positions_param(params, k).map_err(|e| EvalError::bad_params("bits", e))?;
                Ok(rekey(move |obs: &Observable| obs.embed(&positions, k)))
            },
        );

        for (name, positions) in &self.restrictions {
            let m = positions.len();
            let positions = positions.clone();
            st.add_nat(name.clone(), q_object(1 << k), q_object(1 << m), move |params| {
                if !params.is_empty() {
                    return Err(EvalError::bad_params("restriction", "takes no parameters"));
                }
                let positions = positions.clone();
                Ok(rekey(move |obs: &Observable| obs.embed(&positions, k)))
            });
        }
        st
    }
}

fn single_name<'a>(what: &str, params: &'a [Param]) -> Result<&'a str, String> {
    match params {
        [Param::Name(s)] => Ok(s),
        _ => Err(format!("`{what}` takes one name parameter")),
    }
}

fn positions_param(params: &[Param], k: usize) -> Result<Vec<usize>, String> {
    let positions = params
        .iter()
        .map(|p| match p.as_num() {
            Some(x) if x.fract() == 0.0 && x >= 1.0 => Ok(x as usize),
            _ => Err(format!("qubit positions must be integers >= 1, got `{p}`")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_positions(&positions, k).map_err(|e| e.to_string())?;
    Ok(positions)
}

/// Table reindexing `t ↦ (A ↦ t(g(A)))`, caching `g` per observable.
fn rekey<G>(g: G) -> ValueMap
where
    G: Fn(&Observable) -> Result<Observable, QuantumError> + Send + Sync + 'static,
{
    let g = Arc::new(g);
    let cache: Arc<Mutex<HashMap<String, Key>>> = Arc::default();
    Arc::new(move |v: &FunctorValue| {
        let FunctorValue::Table(t) = v else {
            return Err(EvalError::shape("table", v.kind()));
        };
        let (t, g, cache) = (t.clone(), Arc::clone(&g), Arc::clone(&cache));
        Ok(FunctorValue::lazy(Arc::new(move |key: &Key| {
            let obs = key.payload::<Observable>().ok_or_else(|| QuantumError::Unknown {
                kind: "observable",
                name: key.label().to_string(),
            })?;
            let cached = cache.lock().expect("cache lock").get(obs.name()).cloned();
            let mapped = match cached {
                Some(k) => k,
                None => {
                    let image = g(obs)?;
                    let k = Key::obj(image.name().to_string(), Arc::new(image));
                    cache.lock().expect("cache lock").insert(obs.name().to_string(), k.clone());
                    k
                }
            };
            t.get(&mapped)
        })))
    })
}

#[derive(Debug)]
struct Growing {
    states: Vec<PureState>,
    names: Vec<String>,
    budget: usize,
}

/// How measurement successors are mapped to carrier indices.
#[derive(Clone)]
enum Resolver {
    /// Successors outside the carrier are reported as missing.
    Frozen(Arc<(Vec<PureState>, Vec<String>)>),
    /// Successors outside the carrier are appended to it.
    Growing(Arc<Mutex<Growing>>),
}

/// Eigenvalues carry solver noise, so names use nine decimals at most.
fn fmt_outcome(r: f64) -> String {
    let rounded = (r * 1e9).round() / 1e9;
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

impl Resolver {
    fn state(&self, x: usize) -> Result<PureState, EvalError> {
        match self {
            Resolver::Frozen(c) => c.0.get(x).cloned(),
            Resolver::Growing(g) => g.lock().expect("carrier lock").states.get(x).cloned(),
        }
        .ok_or(EvalError::StateOutOfRange(x))
    }

    fn resolve(&self, s: &PureState, parent: usize, obs: &str, value: f64) -> Result<usize, EvalError> {
        match self {
            Resolver::Frozen(c) => c.0.iter().position(|t| t.same_ray(s)).ok_or_else(|| {
                QuantumError::MissingSuccessor {
                    state: c.1[parent].clone(),
                    observable: obs.to_string(),
                }
                .into()
            }),
            Resolver::Growing(g) => {
                let mut g = g.lock().expect("carrier lock");
                if let Some(i) = g.states.iter().position(|t| t.same_ray(s)) {
                    return Ok(i);
                }
                if g.states.len() >= g.budget {
                    return Err(QuantumError::Budget(g.budget).into());
                }
                let name = format!("{}|{}={}", g.names[parent], obs, fmt_outcome(value));
                g.states.push(s.clone());
                g.names.push(name);
                Ok(g.states.len() - 1)
            }
        }
    }

    fn step(&self, x: usize, eps: f64) -> Result<FunctorValue, EvalError> {
        let state = self.state(x)?;
        let resolver = self.clone();
        Ok(FunctorValue::lazy(Arc::new(move |key: &Key| {
            let obs = key.payload::<Observable>().ok_or_else(|| QuantumError::Unknown {
                kind: "observable",
                name: key.label().to_string(),
            })?;
            let branches = obs.measure(&state, eps)?;
            let entries = branches
                .iter()
                .map(|b| {
                    let y = resolver.resolve(&b.state, x, obs.name(), b.value)?;
                    Ok((FunctorValue::pair(Label::Real(b.value), FunctorValue::Base(y)), b.probability))
                })
                .collect::<Result<Vec<_>, EvalError>>()?;
            FunctorValue::dist(entries)
        })))
    }
}

/// A register together with a finite carrier of named pure states. The
/// first `declared` states are the ones the user declared, and the first
/// `initial` of those are the designated initial states.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    system: Arc<QuantumSystem>,
    states: Vec<PureState>,
    names: Vec<String>,
    initial: usize,
    declared: usize,
    budget: usize,
    eps: f64,
}

/// Result of checking a formula on a model.
#[derive(Clone, Debug)]
pub struct QuantumCheck {
    /// The model after carrier closure.
    pub closed: QuantumModel,
    /// The adaptation-free formula that was evaluated.
    pub evaluated: Formula,
    pub verdicts: Verdicts,
}

impl QuantumCheck {
    /// Verdicts at the initial states.
    pub fn initial_verdicts(&self) -> &[Option<bool>] {
        &self.verdicts[..self.closed.initial]
    }

    pub fn holds_everywhere_initially(&self) -> bool {
        self.initial_verdicts().iter().all(|v| *v == Some(true))
    }
}

impl QuantumModel {
    pub fn new(system: QuantumSystem) -> Self {
        Self {
            system: Arc::new(system),
            states: Vec::new(),
            names: Vec::new(),
            initial: 0,
            declared: 0,
            budget: DEFAULT_BUDGET,
            eps: 1e-9,
        }
    }

    pub fn system(&self) -> &Arc<QuantumSystem> {
        &self.system
    }

    pub fn qubits(&self) -> usize {
        self.system.qubits
    }

    pub fn fibre(&self) -> FibObject {
        FibObject::generator(format!("Q{}", self.system.dim()))
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn set_eps(&mut self, eps: f64) -> &mut Self {
        self.eps = eps;
        self
    }

    /// Keeps only the first `n` declared states as initial ones.
    pub fn set_initial(&mut self, n: usize) -> &mut Self {
        self.initial = n.min(self.initial);
        self
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn set_budget(&mut self, budget: usize) -> &mut Self {
        self.budget = budget;
        self
    }

    /// Declares an initial state. Must be called before any closure.
    pub fn add_state(&mut self, name: impl Into<String>, state: PureState) -> Result<usize, QuantumError> {
        let name = name.into();
        if state.dim() != self.system.dim() {
            return Err(QuantumError::Dimension {
                expected: self.system.dim(),
                found: state.dim(),
            });
        }
        if self.names.contains(&name) {
            return Err(QuantumError::Invalid(format!("state name `{name}` is already in use")));
        }
        if self.states.len() != self.declared {
            return Err(QuantumError::Invalid("cannot declare states after closure".into()));
        }
        if self.initial == self.declared {
            self.initial += 1;
        }
        self.states.push(state);
        self.names.push(name);
        self.declared += 1;
        Ok(self.declared - 1)
    }

    pub fn structure(&self) -> Structure {
        let mut st = self.system.structure();
        st.set_eps(self.eps);
        st
    }

    /// The coalgebra on the current carrier; successors outside it make
    /// evaluation report the horizon.
    pub fn coalgebra(&self) -> Result<Coalgebra, EvalError> {
        if self.states.is_empty() {
            return Err(QuantumError::Invalid("model has no states".into()).into());
        }
        let resolver = Resolver::Frozen(Arc::new((self.states.clone(), self.names.clone())));
        let gamma = (0..self.states.len())
            .map(|x| resolver.step(x, self.eps))
            .collect::<Result<Vec<_>, _>>()?;
        Coalgebra::new(self.fibre(), self.names.clone(), gamma)
    }

    /// Extends the carrier with the measurement successors that evaluating
    /// `phi` at the current states reaches.
    pub fn close(&self, phi: &Formula, st: &Structure) -> Result<QuantumModel, EvalError> {
        let flat = eliminate_adaptations(phi, st.signature())?;
        let compiled = CompiledFormula::compile(&flat, st)?;
        let growing = Arc::new(Mutex::new(Growing {
            states: self.states.clone(),
            names: self.names.clone(),
            budget: self.budget,
        }));
        let resolver = Resolver::Growing(Arc::clone(&growing));
        let eps = self.eps;
        let step = |y: usize| resolver.step(y, eps);
        for x in 0..self.states.len() {
            compiled.holds(&step, x)?;
        }
        let g = growing.lock().expect("carrier lock");
        Ok(QuantumModel {
            states: g.states.clone(),
            names: g.names.clone(),
            ..self.clone()
        })
    }

    /// Rejects outcome labels that are not eigenvalues of their observable.
    pub fn validate_outcomes(&self, phi: &Formula) -> Result<(), QuantumError> {
        match phi {
            Formula::Top(_) => Ok(()),
            Formula::Neg(inner) | Formula::Adapt(_, inner) => self.validate_outcomes(inner),
            Formula::Conj(items) => items.iter().try_for_each(|f| self.validate_outcomes(f)),
            Formula::Apply(m, args) => {
                self.validate_modality(m, None)?;
                args.iter().try_for_each(|f| self.validate_outcomes(f))
            }
        }
    }

    fn validate_modality(&self, m: &ModalityExpr, observable: Option<&Observable>) -> Result<(), QuantumError> {
        match m {
            ModalityExpr::Base { symbol, params, .. } => {
                if let (Some(obs), "detcert", [Param::Num(r)]) = (observable, symbol.as_str(), params.as_slice()) {
                    if !obs.has_eigenvalue(*r) {
                        return Err(QuantumError::OutcomeNotInSpectrum {
                            outcome: *r,
                            observable: obs.name().to_string(),
                        });
                    }
                }
                Ok(())
            }
            ModalityExpr::Neg(inner) => self.validate_modality(inner, None),
            ModalityExpr::Weaken { inner, .. } => self.validate_modality(inner, None),
            ModalityExpr::Conj(items) => items.iter().try_for_each(|e| self.validate_modality(e, None)),
            ModalityExpr::Superscript(inner, f) => {
                let obs = match f {
                    FibMorphism::Gen(r) if r.name == "ev" => match r.params.as_slice() {
                        [Param::Name(a)] => Some(self.system.observable(a)?.as_ref()),
                        _ => None,
                    },
                    _ => None,
                };
                self.validate_modality(inner, obs)
            }
            ModalityExpr::Then(first, second) => {
                self.validate_modality(first, observable)?;
                self.validate_modality(second, None)
            }
        }
    }

    /// Validates outcomes, closes the carrier along `phi`, and evaluates the
    /// adaptation-free form of `phi` on the closed carrier.
    pub fn check(&self, phi: &Formula, exec: Exec) -> Result<QuantumCheck, EvalError> {
        let st = self.structure();
        let ty = type_of_formula(phi, st.signature())?;
        let fibre = st
            .signature()
            .expand_object(&self.fibre())
            .map_err(|msg| TypeError::new("", "declared object", msg))?;
        if ty != fibre {
            return Err(TypeError::new("", format!("formula of type {}", self.fibre()), ty.to_string()).into());
        }
        self.validate_outcomes(phi)?;
        let closed = self.close(phi, &st)?;
        let evaluated = eliminate_adaptations(phi, st.signature())?;
        let compiled = CompiledFormula::compile(&evaluated, &st)?;
        let verdicts = compiled.verdicts(&st, &closed.coalgebra()?, exec)?;
        Ok(QuantumCheck {
            closed,
            evaluated,
            verdicts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gates::{bell_observable, gate};
    use crate::quantum::state::parse_state;
    use crate::syntax::parse_formula;

    fn one_qubit() -> QuantumModel {
        let mut sys = QuantumSystem::new(1).unwrap();
        sys.add_observable(Observable::new("Z", gate("Z").unwrap()).unwrap()).unwrap();
        sys.add_observable(Observable::new("X", gate("X").unwrap()).unwrap()).unwrap();
        sys.add_unitary("H", gate("H").unwrap()).unwrap();
        let mut m = QuantumModel::new(sys);
        m.add_state("zero", parse_state("0").unwrap()).unwrap();
        m.add_state("plus", parse_state("+").unwrap()).unwrap();
        m
    }

    #[test]
    fn certainty_of_eigenstates() {
        let m = one_qubit();
        let st = m.structure();
        let phi = parse_formula("qdeq[1, 1, Z](T)", st.signature()).unwrap();
        let check = m.check(&phi, Exec::Sequential).unwrap();
        assert_eq!(check.initial_verdicts(), &[Some(true), Some(false)]);
        let half = parse_formula("qdeq[0.5, -1, Z](T)", st.signature()).unwrap();
        let check = m.check(&half, Exec::Sequential).unwrap();
        assert_eq!(check.initial_verdicts(), &[Some(false), Some(true)]);
    }

    #[test]
    fn closure_adds_successors() {
        let m = one_qubit();
        let st = m.structure();
        let phi = parse_formula("measure[X, 1, -1](qdeq[1, 1, Z](T), qdeq[1, 1, Z](T))", st.signature()).unwrap();
        let check = m.check(&phi, Exec::Sequential).unwrap();
        // zero, plus, then |-> and |1> reached by measuring.
        assert_eq!(check.closed.states().len(), 4);
        assert_eq!(check.initial_verdicts(), &[Some(false), Some(false)]);
    }

    #[test]
    fn unitary_adaptation_conjugates() {
        let m = one_qubit();
        let st = m.structure();
        // Measuring Z after H at |+> yields 1 with certainty.
        let phi = parse_formula("U[H](qdeq[1, 1, Z](T))", st.signature()).unwrap();
        let check = m.check(&phi, Exec::Sequential).unwrap();
        assert_eq!(check.initial_verdicts(), &[Some(false), Some(true)]);
    }

    #[test]
    fn outcomes_outside_spectrum_are_rejected() {
        let m = one_qubit();
        let st = m.structure();
        let phi = parse_formula("certain[2, Z](T)", st.signature()).unwrap();
        let err = m.check(&phi, Exec::Sequential).unwrap_err();
        assert!(matches!(err, EvalError::Quantum(QuantumError::OutcomeNotInSpectrum { .. })));
    }

    #[test]
    fn budget_is_enforced() {
        let mut m = one_qubit();
        m.set_budget(2);
        let st = m.structure();
        let phi = parse_formula("measure[X, 1, -1](T, T)", st.signature()).unwrap();
        let err = m.check(&phi, Exec::Sequential).unwrap_err();
        assert!(matches!(err, EvalError::Quantum(QuantumError::Budget(2))));
    }

    #[test]
    fn restrictions_embed_observables() {
        let mut sys = QuantumSystem::new(3).unwrap();
        sys.add_observable(bell_observable()).unwrap();
        sys.add_observable(Observable::of_state("bell1", &parse_state("bell1").unwrap()).unwrap())
            .unwrap();
        sys.add_restriction("Pair", vec![2, 3]).unwrap();
        let mut m = QuantumModel::new(sys);
        m.add_state("s", parse_state("0 * bell1").unwrap()).unwrap();
        let st = m.structure();
        for text in ["Pair(P[bell1])", "bits[2, 3](bell1)", "!bits[1, 2](bell1)"] {
            let phi = parse_formula(text, st.signature()).unwrap();
            let check = m.check(&phi, Exec::Sequential).unwrap();
            assert_eq!(check.initial_verdicts(), &[Some(true)], "{text}");
        }
    }
}
