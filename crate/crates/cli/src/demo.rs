//! Teleportation and entanglement swapping, checked through the full
//! parse, type, close, translate and evaluate pipeline.

use fibred_core::quantum::{
    bell_correction, bell_observable, bell_state, gate, random_state, CMatrix, Observable, PureState, QuantumModel,
    QuantumSystem,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;
use crate::formula_file::parse_formula_file;
use crate::model_file::LoadedModel;
use crate::report::{run_check, CheckOptions, CheckReport};

pub const TELEPORT_FORMULAS: &str = include_str!("../protocols/teleport.fml");
pub const SWAP_FORMULAS: &str = include_str!("../protocols/swap.fml");

/// Three-qubit teleportation model with initial state `phi ⊗ channel`.
pub fn teleport_model(phi: &PureState, channel: &PureState) -> Result<QuantumModel, CliError> {
    let mut sys = QuantumSystem::new(3)?;
    sys.add_observable(bell_observable())?;
    sys.add_observable(Observable::of_state("phi", phi)?)?;
    sys.add_observable(Observable::of_state("bell1", &bell_state(1)?)?)?;
    for i in 1..=4 {
        sys.add_unitary(format!("C{i}"), bell_correction(i)?)?;
    }
    sys.add_restriction("Alice", vec![1])?;
    sys.add_restriction("Channel", vec![2, 3])?;
    sys.add_restriction("Both", vec![1, 2])?;
    sys.add_restriction("Bob", vec![3])?;
    let mut model = QuantumModel::new(sys);
    model.add_state("init", phi.tensor(channel))?;
    Ok(model)
}

/// Four-qubit swapping model with initial state `Bell₁ ⊗ Bell₁`; without
/// corrections every `U[Ci]`, `U[Di]` is the identity.
pub fn swap_model(corrections: bool) -> Result<QuantumModel, CliError> {
    let mut sys = QuantumSystem::new(4)?;
    sys.add_observable(bell_observable())?;
    sys.add_observable(Observable::of_state("bell1", &bell_state(1)?)?)?;
    let id = CMatrix::identity(2);
    for i in 1..=4 {
        let fix = if corrections { bell_correction(i)? } else { gate("I")? };
        sys.add_unitary(format!("C{i}"), fix.kron(&id))?;
        sys.add_unitary(format!("D{i}"), fix.kron(&id))?;
    }
    let mut model = QuantumModel::new(sys);
    let b = bell_state(1)?;
    model.add_state("init", b.tensor(&b))?;
    Ok(model)
}

/// `|0⟩, |1⟩, |+⟩, |−⟩, (|0⟩+i|1⟩)/√2` followed by `random` seeded
/// random states.
pub fn sweep_states(seed: u64, random: usize) -> Result<Vec<(String, PureState)>, CliError> {
    let mut out: Vec<(String, PureState)> = ["0", "1", "+", "-", "+i"]
        .iter()
        .map(|s| Ok((format!("|{s}>"), fibred_core::quantum::parse_state(s)?)))
        .collect::<Result<_, CliError>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        out.push((format!("random{i}"), random_state(&mut rng, 1)));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolRun {
    pub label: String,
    pub state: String,
    /// Probability of each Bell outcome `1..=4` at the initial state.
    pub outcome_probabilities: Vec<(f64, f64)>,
    pub reports: Vec<CheckReport>,
}

impl ProtocolRun {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }
}

fn bell_probabilities(model: &QuantumModel, positions: &[usize]) -> Result<Vec<(f64, f64)>, CliError> {
    let obs = bell_observable().embed(positions, model.qubits())?;
    let branches = obs.measure(&model.states()[0], model.eps())?;
    Ok((1..=4)
        .map(|r| {
            let p = branches.iter().find(|b| b.value == r as f64).map_or(0.0, |b| b.probability);
            (r as f64, p)
        })
        .collect())
}

fn run_formulas(model: &QuantumModel, formulas: &str, opts: &CheckOptions) -> Result<Vec<CheckReport>, CliError> {
    let loaded = LoadedModel::Quantum(model.clone());
    parse_formula_file(formulas)?
        .iter()
        .map(|f| run_check(&loaded, &f.name, &f.text, opts))
        .collect()
}

pub fn demo_teleport(states: &[(String, PureState)], opts: &CheckOptions) -> Result<Vec<ProtocolRun>, CliError> {
    let channel = bell_state(1)?;
    states
        .iter()
        .map(|(label, phi)| {
            let model = teleport_model(phi, &channel)?;
            Ok(ProtocolRun {
                label: label.clone(),
                state: phi.to_string(),
                outcome_probabilities: bell_probabilities(&model, &[1, 2])?,
                reports: run_formulas(&model, TELEPORT_FORMULAS, opts)?,
            })
        })
        .collect()
}

pub fn demo_swap(corrections: bool, opts: &CheckOptions) -> Result<ProtocolRun, CliError> {
    let model = swap_model(corrections)?;
    Ok(ProtocolRun {
        label: if corrections { "swap".into() } else { "swap without corrections".into() },
        state: model.states()[0].to_string(),
        outcome_probabilities: bell_probabilities(&model, &[2, 3])?,
        reports: run_formulas(&model, SWAP_FORMULAS, opts)?,
    })
}

pub fn render_run(run: &ProtocolRun) -> String {
    let mut out = format!("== {} ==\nstate      {}\n", run.label, run.state);
    let probs: Vec<String> = run
        .outcome_probabilities
        .iter()
        .map(|(r, p)| format!("{r}: {p:.6}"))
        .collect();
    out.push_str(&format!("Bell outcome probabilities  {}\n", probs.join("  ")));
    for r in &run.reports {
        out.push_str(&format!(
            "  {:<10} {}\n",
            r.name,
            if r.holds { "holds" } else { "FAILS" }
        ));
    }
    out
}
