use std::collections::BTreeSet;

use super::value::{FunctorValue, StateId};
use crate::error::EvalError;
use crate::signature::FibObject;

/// A finite `⟦A⟧`-coalgebra `(X, γ)`.
#[derive(Clone, Debug)]
pub struct Coalgebra {
    fibre: FibObject,
    names: Vec<String>,
    gamma: Vec<FunctorValue>,
}

impl Coalgebra {
    /// Checks that the carrier is nonempty with unique names and that every
    /// state referenced by `gamma` lies in the carrier.
    pub fn new(fibre: FibObject, names: Vec<String>, gamma: Vec<FunctorValue>) -> Result<Self, EvalError> {
        if names.is_empty() {
            return Err(EvalError::shape("nonempty carrier", "empty carrier"));
        }
        if names.len() != gamma.len() {
            return Err(EvalError::shape(
                format!("{} transition values", names.len()),
                format!("{}", gamma.len()),
            ));
        }
        let unique: BTreeSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(EvalError::shape("unique state names", "duplicate state name"));
        }
        if let Some(x) = gamma.iter().filter_map(FunctorValue::max_state).max() {
            if x >= names.len() {
                return Err(EvalError::StateOutOfRange(x));
            }
        }
        Ok(Self { fibre, names, gamma })
    }

    /// States named `s0`, `s1`, ….
    pub fn indexed(fibre: FibObject, gamma: Vec<FunctorValue>) -> Result<Self, EvalError> {
        let names = (0..gamma.len()).map(|i| format!("s{i}")).collect();
        Self::new(fibre, names, gamma)
    }

    pub fn fibre(&self) -> &FibObject {
        &self.fibre
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: StateId) -> &str {
        &self.names[x]
    }

    pub fn gamma(&self) -> &[FunctorValue] {
        &self.gamma
    }

    pub fn step(&self, x: StateId) -> Result<&FunctorValue, EvalError> {
        self.gamma.get(x).ok_or(EvalError::StateOutOfRange(x))
    }

    /// The same carrier with a new structure map of type `fibre`.
    pub fn restructured(&self, fibre: FibObject, gamma: Vec<FunctorValue>) -> Result<Self, EvalError> {
        Self::new(fibre, self.names.clone(), gamma)
    }
}
