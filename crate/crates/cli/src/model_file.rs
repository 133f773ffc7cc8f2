//! TOML model files. The `kind` key selects the backend:
//!
//! * `quantum`: `qubits`, `[observables.NAME]` with exactly one of
//!   `gate`, `projector`, `state` or `matrix`, `[unitaries]` mapping names
//!   to gate expressions or matrices, `[restrictions]` mapping names to
//!   1-based qubit lists, and `[[states]]` entries with `name` and `state`.
//! * `kripke`: `states`, `[transitions]` mapping a state to its successors.
//! * `lts`: `states`, `[transitions.STATE]` mapping labels to successors.
//! * `markov`: `states`, `[transitions.STATE]` mapping successors to
//!   probabilities.
//!
//! Every kind accepts `initial` (defaults to all declared states),
//! `tolerance` and `max_carrier`.

use std::collections::{BTreeMap, BTreeSet};

use fibred_core::classical::{classical_structure, obj};
use fibred_core::quantum::{parse_complex, parse_gate_expr, parse_state, CMatrix, Observable, QuantumModel, QuantumSystem};
use fibred_core::semantics::{Coalgebra, FunctorValue, Key, Structure};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelFile {
    Quantum(QuantumFile),
    Kripke(ClassicalFile<Vec<String>>),
    Lts(ClassicalFile<BTreeMap<String, Vec<String>>>),
    Markov(ClassicalFile<BTreeMap<String, f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumFile {
    qubits: usize,
    #[serde(default)]
    observables: BTreeMap<String, ObservableSpec>,
    #[serde(default)]
    unitaries: BTreeMap<String, MatrixSpec>,
    #[serde(default)]
    restrictions: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    states: Vec<StateSpec>,
    initial: Option<Vec<String>>,
    tolerance: Option<f64>,
    max_carrier: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableSpec {
    gate: Option<String>,
    projector: Option<String>,
    state: Option<String>,
    matrix: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixSpec {
    Expr(String),
    Rows(Vec<Vec<Entry>>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Num(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpec {
    name: String,
    state: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalFile<T> {
    states: Vec<String>,
    #[serde(default = "BTreeMap::new")]
    transitions: BTreeMap<String, T>,
    initial: Option<Vec<String>>,
    tolerance: Option<f64>,
    max_carrier: Option<usize>,
}

/// A loaded model ready for checking.
#[derive(Clone)]
pub enum LoadedModel {
    Quantum(QuantumModel),
    Classical {
        structure: Structure,
        coalgebra: Coalgebra,
        initial: Vec<usize>,
    },
}

impl LoadedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedModel::Quantum(_) => "quantum",
            LoadedModel::Classical { coalgebra, .. } => match coalgebra.fibre().to_string().as_str() {
                "P" => "kripke",
                "E*P" => "lts",
                _ => "markov",
            },
        }
    }
}

fn model_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(format!("model file: {}", msg.into()))
}

pub fn load_model(text: &str) -> Result<LoadedModel, CliError> {
    let file: ModelFile = toml::from_str(text).map_err(|e| model_err(e.to_string()))?;
    match file {
        ModelFile::Quantum(q) => load_quantum(q),
        ModelFile::Kripke(f) => load_classical(f, "P", |succ, index| {
            Ok(FunctorValue::states(lookup_all(succ, index)?))
        }),
        ModelFile::Lts(f) => {
            let labels: BTreeSet<String> = f.transitions.values().flat_map(|m| m.keys().cloned()).collect();
            load_classical(f, "E*P", move |succ: &BTreeMap<String, Vec<String>>, index| {
                let entries = labels
                    .iter()
                    .map(|l| {
                        let targets = succ.get(l).map(Vec::as_slice).unwrap_or(&[]);
                        Ok((Key::sym(l.clone()), FunctorValue::states(lookup_all(targets, index)?)))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(FunctorValue::table(entries))
            })
        }
        ModelFile::Markov(f) => load_classical(f, "D", |succ: &BTreeMap<String, f64>, index| {
            if succ.is_empty() {
                return Err(model_err("every Markov state needs at least one successor"));
            }
            let entries = succ
                .iter()
                .map(|(s, p)| Ok((FunctorValue::Base(lookup(s, index)?), *p)))
                .collect::<Result<Vec<_>, CliError>>()?;
            FunctorValue::dist(entries).map_err(|e| model_err(e.to_string()))
        }),
    }
}

fn lookup(name: &str, index: &BTreeMap<String, usize>) -> Result<usize, CliError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| model_err(format!("unknown state `{name}`")))
}

fn lookup_all(names: &[String], index: &BTreeMap<String, usize>) -> Result<Vec<usize>, CliError> {
    names.iter().map(|n| lookup(n, index)).collect()
}

fn index_names(names: &[String]) -> Result<BTreeMap<String, usize>, CliError> {
    let mut index = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(model_err(format!("duplicate state `{n}`")));
        }
    }
    Ok(index)
}

fn initial_ids(initial: &Option<Vec<String>>, index: &BTreeMap<String, usize>) -> Result<Vec<usize>, CliError> {
    match initial {
        None => Ok((0..index.len()).collect()),
        Some(names) => lookup_all(names, index),
    }
}

fn load_classical<T, F>(f: ClassicalFile<T>, fibre: &str, step: F) -> Result<LoadedModel, CliError>
where
    T: Default,
    F: Fn(&T, &BTreeMap<String, usize>) -> Result<FunctorValue, CliError>,
{
    if f.states.is_empty() {
        return Err(model_err("no states declared"));
    }
    if let Some(limit) = f.max_carrier {
        if f.states.len() > limit {
            return Err(CliError::Closure(format!(
                "carrier of {} states exceeds --max-carrier {limit}",
                f.states.len()
            )));
        }
    }
    let index = index_names(&f.states)?;
    for name in f.transitions.keys() {
        lookup(name, &index)?;
    }
    let empty = T::default();
    let gamma = f
        .states
        .iter()
        .map(|s| step(f.transitions.get(s).unwrap_or(&empty), &index))
        .collect::<Result<Vec<_>, _>>()?;
    let coalgebra = Coalgebra::new(obj(fibre), f.states.clone(), gamma).map_err(|e| model_err(e.to_string()))?;
    let mut structure = classical_structure();
    if let Some(eps) = f.tolerance {
        structure.set_eps(eps);
    }
    Ok(LoadedModel::Classical {
        structure,
        coalgebra,
        initial: initial_ids(&f.initial, &index)?,
    })
}

fn matrix_from_rows(rows: &[Vec<Entry>]) -> Result<CMatrix, CliError> {
    let rows = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| match e {
                    Entry::Num(x) => Ok(num_complex::Complex64::new(*x, 0.0)),
                    Entry::Text(s) => parse_complex(s).map_err(|e| model_err(e.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    CMatrix::from_rows(rows).map_err(|e| model_err(e.to_string()))
}

fn load_observable(name: &str, spec: &ObservableSpec) -> Result<Observable, CliError> {
    let q = |r: Result<Observable, fibred_core::error::QuantumError>| {
        r.map_err(|e| model_err(format!("observable `{name}`: {e}")))
    };
    let gate = |s: &str| parse_gate_expr(s).map_err(|e| model_err(format!("observable `{name}`: {e}")));
    match (&spec.gate, &spec.projector, &spec.state, &spec.matrix) {
        (Some(g), None, None, None) => q(Observable::new(name, gate(g)?)),
        (None, Some(p), None, None) => q(Observable::projector(name, gate(p)?)),
        (None, None, Some(s), None) => {
            let state = parse_state(s).map_err(|e| model_err(format!("observable `{name}`: {e}")))?;
            q(Observable::of_state(name, &state))
        }
        (None, None, None, Some(rows)) => q(Observable::new(name, matrix_from_rows(rows)?)),
        _ => Err(model_err(format!(
            "observable `{name}` needs exactly one of gate, projector, state, matrix"
        ))),
    }
}

fn load_quantum(f: QuantumFile) -> Result<LoadedModel, CliError> {
    let wrap = |what: String| move |e: fibred_core::error::QuantumError| model_err(format!("{what}: {e}"));
    let mut sys = QuantumSystem::new(f.qubits).map_err(wrap("qubits".into()))?;
    for (name, spec) in &f.observables {
        let obs = load_observable(name, spec)?;
        sys.add_observable(obs).map_err(wrap(format!("observable `{name}`")))?;
    }
    for (name, spec) in &f.unitaries {
        let u = match spec {
            MatrixSpec::Expr(s) => parse_gate_expr(s).map_err(wrap(format!("unitary `{name}`")))?,
            MatrixSpec::Rows(rows) => matrix_from_rows(rows)?,
        };
        sys.add_unitary(name.clone(), u).map_err(wrap(format!("unitary `{name}`")))?;
    }
    for (name, positions) in &f.restrictions {
        sys.add_restriction(name.clone(), positions.clone())
            .map_err(wrap(format!("restriction `{name}`")))?;
    }
    let mut model = QuantumModel::new(sys);
    if let Some(eps) = f.tolerance {
        model.set_eps(eps);
    }
    if let Some(limit) = f.max_carrier {
        model.set_budget(limit);
    }
    if f.states.is_empty() {
        return Err(model_err("no states declared"));
    }
    let names: Vec<String> = f.states.iter().map(|s| s.name.clone()).collect();
    let index = index_names(&names)?;
    let initial = initial_ids(&f.initial, &index)?;
    // Declared initial states come first so the closure keeps them in front.
    let mut order: Vec<usize> = initial.clone();
    order.extend((0..names.len()).filter(|i| !initial.contains(i)));
    for &i in &order {
        let spec = &f.states[i];
        let state = parse_state(&spec.state).map_err(wrap(format!("state `{}`", spec.name)))?;
        model
            .add_state(spec.name.clone(), state)
            .map_err(wrap(format!("state `{}`", spec.name)))?;
    }
    if initial.len() != names.len() {
        model.set_initial(initial.len());
    }
    Ok(LoadedModel::Quantum(model))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_kripke_and_rejects_unknown_states() {
        let m = load_model(
            "kind = \"kripke\"\nstates = [\"a\", \"b\"]\ninitial = [\"a\"]\n[transitions]\na = [\"b\"]\n",
        )
        .unwrap();
        assert_eq!(m.kind(), "kripke");
        let bad = load_model("kind = \"kripke\"\nstates = [\"a\"]\n[transitions]\na = [\"z\"]\n");
        assert!(matches!(bad, Err(CliError::Parse(_))));
    }

    #[test]
    fn loads_quantum_models() {
        let text = r#"
kind = "quantum"
qubits = 1
[observables.Z]
gate = "Z"
[observables.M]
matrix = [[1, 0], [0, "-1"]]
[unitaries]
H = "H"
[[states]]
name = "zero"
state = "0"
"#;
        let LoadedModel::Quantum(m) = load_model(text).unwrap() else {
            panic!("expected a quantum model");
        };
        assert_eq!(m.states().len(), 1);
        assert!(m.system().observable("M").is_ok());
    }

    #[test]
    fn observable_needs_one_source() {
        let text = "kind = \"quantum\"\nqubits = 1\n[observables.Z]\ngate = \"Z\"\nstate = \"0\"\n[[states]]\nname = \"s\"\nstate = \"0\"\n";
        assert!(load_model(text).is_err());
    }
}
