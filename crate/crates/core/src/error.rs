use std::fmt;

use thiserror::Error;

/// A typing failure: no derivation exists for the term at `location`.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    /// Path from the root of the term, e.g. `/apply/arg1/adapt`.
    pub location: String,
    pub expected: String,
    pub found: String,
}

impl TypeError {
    pub fn new(
        location: impl Into<String>,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        Self {
            location: location.into(),
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub(crate) fn at(mut self, prefix: &str) -> Self {
        self.location = format!("{prefix}{}", self.location);
        self
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = if self.location.is_empty() { "/" } else { &self.location };
        write!(
            f,
            "type error at {loc}: expected {}, found {}",
            self.expected, self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Either stage of reading a formula from text.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not a projector")]
    NotProjector,
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid qubit positions {positions:?} for {qubits} qubits")]
    Positions { positions: Vec<usize>, qubits: usize },
    #[error("index {0} out of range")]
    Index(usize),
    #[error("outcome {outcome} is not an eigenvalue of `{observable}`")]
    OutcomeNotInSpectrum { outcome: f64, observable: String },
    #[error("successor state of `{state}` under `{observable}` is not in the carrier")]
    MissingSuccessor { state: String, observable: String },
    #[error("carrier closure exceeded the budget of {0} states")]
    Budget(usize),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },
    #[error("table has no entry for key `{0}`")]
    MissingKey(String),
    #[error("no interpretation for {kind} `{name}`")]
    Uninterpreted { kind: &'static str, name: String },
    #[error("bad parameters for `{name}`: {reason}")]
    BadParams { name: String, reason: String },
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("state {0} is outside the carrier")]
    StateOutOfRange(usize),
    #[error("truth value at state {0} is not determined by the closed carrier")]
    Undetermined(usize),
    #[error("not a coalgebra homomorphism at state `{0}`")]
    NotHomomorphism(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

impl EvalError {
    pub fn shape(expected: impl Into<String>, found: impl Into<String>) -> Self {
        EvalError::Shape {
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub fn bad_params(name: impl Into<String>, reason: impl Into<String>) -> Self {
        EvalError::BadParams {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True when evaluation stopped because a measurement successor lies
    /// beyond the closed part of a quantum carrier.
    pub fn is_missing_successor(&self) -> bool {
        matches!(self, EvalError::Quantum(QuantumError::MissingSuccessor { .. }))
    }

    /// True for failures caused by the closure horizon of a carrier rather
    /// than by the model or formula.
    pub fn is_horizon(&self) -> bool {
        self.is_missing_successor() || matches!(self, EvalError::Undetermined(_))
    }
}
