use std::path::PathBuf;
use std::process::{Command, Output};

use fibred_cli::demo::{demo_teleport, sweep_states, SWAP_FORMULAS, TELEPORT_FORMULAS};
use fibred_cli::error::CliError;
use fibred_cli::formula_file::parse_formula_file;
use fibred_cli::model_file::load_model;
use fibred_cli::report::{run_check, CheckOptions};
use fibred_core::par::Exec;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fibred"))
}

fn asset(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn shipped_protocol_files_parse() {
    let tele = parse_formula_file(TELEPORT_FORMULAS).unwrap();
    let names: Vec<&str> = tele.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["full", "outcome1", "outcome2", "outcome3", "outcome4"]);
    assert_eq!(parse_formula_file(SWAP_FORMULAS).unwrap().len(), 4);
}

#[test]
fn teleport_model_file_holds() {
    let out = run(&[
        "check",
        "--model",
        &asset("models/teleport.toml"),
        "--formula",
        &asset("protocols/teleport.fml"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("holds at every initial state").count(), 5);
}

#[test]
fn teleportation_without_corrections_fails_except_outcome_one() {
    let text = std::fs::read_to_string(asset("models/teleport.toml"))
        .unwrap()
        .replace("C2 = \"Z\"", "C2 = \"I\"")
        .replace("C3 = \"X\"", "C3 = \"I\"")
        .replace("C4 = \"X.Z\"", "C4 = \"I\"")
        .replace("state = \"+\"", "state = \"[0.6, 0.8]\"")
        .replace("state = \"+ * bell1\"", "state = \"[0.6, 0.8] * bell1\"");
    let model = load_model(&text).unwrap();
    let holds: Vec<bool> = parse_formula_file(TELEPORT_FORMULAS)
        .unwrap()
        .iter()
        .map(|f| run_check(&model, &f.name, &f.text, &CheckOptions::default()).unwrap().holds)
        .collect();
    assert_eq!(holds, [false, true, false, false, false]);
}

#[test]
fn wrong_input_state_is_not_teleported() {
    let text = std::fs::read_to_string(asset("models/teleport.toml"))
        .unwrap()
        .replace("state = \"+\"", "state = \"-\"");
    let model = load_model(&text).unwrap();
    let r = run_check(&model, "full", "P[phi]^Alice", &CheckOptions::default()).unwrap();
    assert!(!r.holds);
    let full = &parse_formula_file(TELEPORT_FORMULAS).unwrap()[0];
    assert!(run_check(&model, &full.name, &full.text, &CheckOptions::default()).unwrap().holds);
}

#[test]
fn classical_models_check() {
    let out = run(&[
        "check",
        "--model",
        &asset("models/kripke.toml"),
        "--formula",
        &asset("formulas/kripke.fml"),
    ]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("satisfying {s3}"));
    let out = run(&["check", "--model", &asset("models/lts.toml"), "--formula", "box^(ev[b] * id[P])(false)"]);
    assert_eq!(code(&out), 0);
    let out = run(&["check", "--model", &asset("models/markov.toml"), "--formula", "deq[1](true)"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn exit_codes() {
    let kripke = asset("models/kripke.toml");
    let tele = asset("models/teleport.toml");
    assert_eq!(code(&run(&["check", "--model", &kripke, "--formula", "box(false"])), 2);
    assert_eq!(code(&run(&["check", "--model", &kripke, "--formula", "deq[1](true)"])), 3);
    assert_eq!(code(&run(&["check", "--model", &tele, "--formula", "certain[7, Bell]^Both(true)"])), 3);
    let budget = run(&[
        "check",
        "--model",
        &tele,
        "--max-carrier",
        "2",
        "--formula",
        &asset("protocols/teleport.fml"),
    ]);
    assert_eq!(code(&budget), 4);
    assert_eq!(code(&run(&["check", "--model", &kripke, "--max-carrier", "3", "--formula", "true"])), 4);
    assert_eq!(code(&run(&["check", "--model", "/nonexistent.toml", "--formula", "true"])), 2);
    assert_eq!(CliError::Counterexample(String::new()).exit_code(), 5);
    assert_eq!(code(&run(&["selftest", "nosuch"])), 2);
}

#[test]
fn demos_exit_status() {
    assert_eq!(code(&run(&["demo", "teleport"])), 0);
    assert_eq!(code(&run(&["demo", "teleport", "--state", "[0.6, 0.8i]"])), 0);
    assert_eq!(code(&run(&["demo", "swap"])), 0);
    let out = run(&["demo", "swap", "--no-corrections"]);
    assert_eq!(code(&out), 1);
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("FAILS").count(), 3);
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "--json",
        "check",
        "--model",
        &asset("models/teleport.toml"),
        "--formula",
        &asset("protocols/teleport.fml"),
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let mut sequential = vec!["--sequential"];
    sequential.extend_from_slice(&args);
    assert_eq!(first.stdout, run(&sequential).stdout);
    let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 5);
    assert!(json[0].get("elapsed_ms").is_none());

    let a = run(&["demo", "teleport", "--seed", "3", "--json"]);
    let b = run(&["demo", "teleport", "--seed", "3", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["demo", "teleport", "--seed", "4", "--json"]).stdout);
}

#[test]
fn selftest_suites_pass() {
    for suite in ["naturality", "separation", "translation", "invariance", "lemmas"] {
        let out = run(&["selftest", suite, "--seed", "11"]);
        assert_eq!(code(&out), 0, "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn parallel_and_sequential_agree_on_teleport_sweep() {
    let states = sweep_states(5, 3).unwrap();
    let par = demo_teleport(&states, &CheckOptions::default()).unwrap();
    let seq = demo_teleport(
        &states,
        &CheckOptions {
            exec: Exec::Sequential,
            ..CheckOptions::default()
        },
    )
    .unwrap();
    for (a, b) in par.iter().zip(&seq) {
        assert_eq!(a.reports, b.reports);
    }
}
