use fibred_core::error::{EvalError, FormulaError, QuantumError};
use thiserror::Error;

/// Failure classes of the command-line pipeline, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Type(String),
    #[error("{0}")]
    Closure(String),
    #[error("{0}")]
    Counterexample(String),
    #[error("{0}")]
    Eval(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Type(_) => 3,
            CliError::Closure(_) => 4,
            CliError::Counterexample(_) => 5,
            CliError::Eval(_) => 6,
        }
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Parse(p) => CliError::Parse(p.to_string()),
            FormulaError::Type(t) => CliError::Type(t.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let msg = e.to_string();
        match e {
            EvalError::Type(_) | EvalError::Quantum(QuantumError::OutcomeNotInSpectrum { .. }) => CliError::Type(msg),
            EvalError::Undetermined(_)
            | EvalError::Quantum(QuantumError::Budget(_) | QuantumError::MissingSuccessor { .. }) => {
                CliError::Closure(msg)
            }
            _ => CliError::Eval(msg),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::from(EvalError::from(e))
    }
}
