use std::fmt::{self, Write as _};
use std::time::Instant;

use fibred_core::par::Exec;
use fibred_core::semantics::{CompiledFormula, Verdicts};
use fibred_core::signature::FibMorphism;
use fibred_core::syntax::{parse_formula_at, translate, type_of_formula};
use serde::Serialize;

use crate::error::CliError;
use crate::model_file::LoadedModel;

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub tolerance: Option<f64>,
    pub max_carrier: Option<usize>,
    pub exec: Exec,
    /// Adds wall-clock time to the report, which then is no longer
    /// reproducible byte for byte.
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StateVerdict {
    pub name: String,
    pub initial: bool,
    /// `null` when the verdict depends on states beyond the closed carrier.
    pub verdict: Option<bool>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub formula: String,
    /// The adaptation-free formula that was evaluated.
    pub evaluated: String,
    pub fibre: String,
    pub model_kind: String,
    pub carrier_size: usize,
    pub satisfying: Vec<String>,
    pub states: Vec<StateVerdict>,
    /// Every initial state satisfies the formula.
    pub holds: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_carrier: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

fn verdict_text(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "undetermined",
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.name)?;
        writeln!(f, "formula    {}", self.formula)?;
        writeln!(f, "type       {}", self.fibre)?;
        let initial = self.states.iter().filter(|s| s.initial).count();
        writeln!(
            f,
            "carrier    {} {} states, {} initial",
            self.carrier_size, self.model_kind, initial
        )?;
        for s in &self.states {
            let mark = if s.initial { "*" } else { " " };
            writeln!(f, "  {mark} {:<32} {}", s.name, verdict_text(s.verdict))?;
        }
        writeln!(f, "satisfying {{{}}}", self.satisfying.join(", "))?;
        if let Some(ms) = self.elapsed_ms {
            writeln!(f, "elapsed    {ms:.3} ms")?;
        }
        write!(
            f,
            "result     {}",
            if self.holds { "holds at every initial state" } else { "FAILS at some initial state" }
        )
    }
}

pub fn render_reports(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{r}");
    }
    out
}

fn build_report(
    name: &str,
    formula: String,
    evaluated: String,
    fibre: String,
    kind: &str,
    names: &[String],
    initial: &[usize],
    verdicts: &Verdicts,
    tolerance: f64,
    max_carrier: Option<usize>,
) -> CheckReport {
    let states: Vec<StateVerdict> = names
        .iter()
        .zip(verdicts)
        .enumerate()
        .map(|(i, (n, v))| StateVerdict {
            name: n.clone(),
            initial: initial.contains(&i),
            verdict: *v,
        })
        .collect();
    let holds = states.iter().filter(|s| s.initial).all(|s| s.verdict == Some(true));
    CheckReport {
        name: name.to_string(),
        formula,
        evaluated,
        fibre,
        model_kind: kind.to_string(),
        carrier_size: names.len(),
        satisfying: states.iter().filter(|s| s.verdict == Some(true)).map(|s| s.name.clone()).collect(),
        states,
        holds,
        tolerance,
        max_carrier,
        elapsed_ms: None,
    }
}

/// Parses, type checks, closes the carrier (quantum models), applies
/// `τ_id` and evaluates.
pub fn run_check(model: &LoadedModel, name: &str, text: &str, opts: &CheckOptions) -> Result<CheckReport, CliError> {
    let started = Instant::now();
    let mut report = match model {
        LoadedModel::Classical {
            structure,
            coalgebra,
            initial,
        } => {
            let mut st = structure.clone();
            if let Some(eps) = opts.tolerance {
                st.set_eps(eps);
            }
            if let Some(limit) = opts.max_carrier {
                if coalgebra.len() > limit {
                    return Err(CliError::Closure(format!(
                        "carrier of {} states exceeds --max-carrier {limit}",
                        coalgebra.len()
                    )));
                }
            }
            let sig = st.signature();
            let fibre = sig.expand_object(coalgebra.fibre()).map_err(CliError::Type)?;
            let phi = parse_formula_at(text, sig, Some(&fibre))?;
            let ty = type_of_formula(&phi, sig).map_err(|e| CliError::Type(e.to_string()))?;
            let flat = translate(&FibMorphism::id(fibre), &phi, sig).map_err(|e| CliError::Type(e.to_string()))?;
            let verdicts = CompiledFormula::compile(&flat, &st)?.verdicts(&st, coalgebra, opts.exec)?;
            build_report(
                name,
                phi.to_string(),
                flat.to_string(),
                ty.to_string(),
                model.kind(),
                coalgebra.names(),
                initial,
                &verdicts,
                st.eps(),
                opts.max_carrier,
            )
        }
        LoadedModel::Quantum(q) => {
            let mut q = q.clone();
            if let Some(eps) = opts.tolerance {
                q.set_eps(eps);
            }
            if let Some(limit) = opts.max_carrier {
                q.set_budget(limit);
            }
            let st = q.structure();
            let sig = st.signature();
            let fibre = sig.expand_object(&q.fibre()).map_err(CliError::Type)?;
            let phi = parse_formula_at(text, sig, Some(&fibre))?;
            let ty = type_of_formula(&phi, sig).map_err(|e| CliError::Type(e.to_string()))?;
            let check = q.check(&phi, opts.exec)?;
            let initial: Vec<usize> = (0..q.initial()).collect();
            build_report(
                name,
                phi.to_string(),
                check.evaluated.to_string(),
                ty.to_string(),
                model.kind(),
                check.closed.names(),
                &initial,
                &check.verdicts,
                q.eps(),
                Some(q.budget()),
            )
        }
    };
    if opts.timing {
        report.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}
