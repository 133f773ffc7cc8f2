use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fibred_cli::demo::{demo_swap, demo_teleport, render_run, sweep_states};
use fibred_cli::error::CliError;
use fibred_cli::formula_file::{parse_formula_file, NamedFormula};
use fibred_cli::model_file::load_model;
use fibred_cli::report::{render_reports, run_check, CheckOptions};
use fibred_cli::selftest::{run_suite, SUITES};
use fibred_core::par::Exec;
use fibred_core::quantum::parse_state;

#[derive(Parser)]
#[command(name = "fibred", version, about = "Model checker for fibred coalgebraic modal logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run evaluation sequentially.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check formulas against a model file.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// A formula file, or an inline formula.
        #[arg(long)]
        formula: String,
        /// Numeric tolerance for probabilities and outcome labels.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Carrier size limit (closure budget for quantum models).
        #[arg(long)]
        max_carrier: Option<usize>,
        /// Include wall-clock timings (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run a built-in protocol.
    Demo {
        #[arg(value_enum)]
        protocol: Protocol,
        /// Teleport this state instead of the default sweep.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Replace all corrections by the identity.
        #[arg(long)]
        no_corrections: bool,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        max_carrier: Option<usize>,
    },
    /// Run a property suite.
    Selftest {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Teleport,
    Swap,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialise")
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.command {
        Command::Check {
            model,
            formula,
            tolerance,
            max_carrier,
            timing,
        } => {
            let loaded = load_model(&read(&model)?)?;
            let path = Path::new(&formula);
            let formulas = if path.is_file() {
                parse_formula_file(&read(path)?)?
            } else {
                vec![NamedFormula {
                    name: "formula".into(),
                    text: formula.clone(),
                }]
            };
            let opts = CheckOptions {
                tolerance,
                max_carrier,
                exec,
                timing,
            };
            let reports = formulas
                .iter()
                .map(|f| run_check(&loaded, &f.name, &f.text, &opts))
                .collect::<Result<Vec<_>, _>>()?;
            if cli.json {
                println!("{}", json(&reports));
            } else {
                print!("{}", render_reports(&reports));
            }
            Ok(reports.iter().all(|r| r.holds))
        }
        Command::Demo {
            protocol,
            state,
            seed,
            no_corrections,
            tolerance,
            max_carrier,
        } => {
            let opts = CheckOptions {
                tolerance,
                max_carrier,
                exec,
                timing: false,
            };
            let runs = match protocol {
                Protocol::Teleport => {
                    let states = match state {
                        Some(s) => vec![(s.clone(), parse_state(&s)?)],
                        None => sweep_states(seed, 10)?,
                    };
                    demo_teleport(&states, &opts)?
                }
                Protocol::Swap => vec![demo_swap(!no_corrections, &opts)?],
            };
            if cli.json {
                println!("{}", json(&runs));
            } else {
                for r in &runs {
                    print!("{}", render_run(r));
                }
            }
            Ok(runs.iter().all(|r| r.all_hold()))
        }
        Command::Selftest { suite, seed } => {
            let suites: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for s in suites {
                reports.push(run_suite(s, seed, exec)?);
            }
            if cli.json {
                println!("{}", json(&reports));
            } else {
                for r in &reports {
                    println!("{r}");
                }
            }
            if let Some(bad) = reports.iter().find(|r| !r.passed()) {
                return Err(CliError::Counterexample(format!("suite {} has counterexamples", bad.suite)));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
