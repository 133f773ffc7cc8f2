//! Built-in property suites: naturality of liftings and natural
//! transformations, separation, translation soundness, behavioural
//! invariance and the lifting lemmas.

use std::fmt;

use fibred_core::classical::gen::{
    all_maps, enumerate_dyadic_dists, random_dyadic_dist, random_kripke, random_map,
    random_translation_instance, random_value, rng, GenRng, DENOMINATOR, FIBRES, KEYS, LABELS,
};
use fibred_core::classical::{behavioural_quotient, classical_structure, obj};
use fibred_core::error::EvalError;
use fibred_core::par::Exec;
use fibred_core::quantum::{gate, parse_state, Observable, QuantumModel, QuantumSystem};
use fibred_core::semantics::{
    check_homomorphism, check_homomorphism_invariance, check_property, Coalgebra, CompiledModality, FunctorValue,
    Key, Label, PropertyCheck, PropertyReport, StateSet, Structure, SubsetPred,
};
use fibred_core::signature::{FibMorphism, Param};
use fibred_core::syntax::{qdeq_expr, ModalityExpr};
use rand::Rng;
use serde::Serialize;

use crate::error::CliError;

pub const SUITES: [&str; 5] = ["naturality", "separation", "translation", "invariance", "lemmas"];

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn from_report(name: impl Into<String>, r: PropertyReport) -> Self {
        Self {
            name: name.into(),
            checked: r.checked,
            counterexamples: r.counterexamples,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseResult::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite, self.seed)?;
        for c in &self.cases {
            writeln!(
                f,
                "  {:<64} {:>9} checks  {}",
                c.name,
                c.checked,
                if c.passed() { "ok" } else { "FAILED" }
            )?;
            for ce in c.counterexamples.iter().take(5) {
                writeln!(f, "      {ce}")?;
            }
            if c.counterexamples.len() > 5 {
                writeln!(f, "      ... {} more", c.counterexamples.len() - 5)?;
            }
        }
        write!(f, "result {}", if self.passed() { "ok" } else { "FAILED" })
    }
}

pub fn run_suite(name: &str, seed: u64, exec: Exec) -> Result<SuiteReport, CliError> {
    let cases = match name {
        "naturality" => naturality(seed, exec)?,
        "separation" => separation(exec)?,
        "translation" => translation(seed, 500, exec)?,
        "invariance" => invariance(seed, 200)?,
        "lemmas" => lemmas(seed, 1000, exec)?,
        other => {
            return Err(CliError::Parse(format!(
                "unknown suite `{other}`, expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        cases,
    })
}

fn num(x: f64) -> Param {
    Param::Num(x)
}

fn base(symbol: &str, params: Vec<Param>, fibre: &str) -> ModalityExpr {
    ModalityExpr::base(symbol, params, obj(fibre))
}

fn deq_family() -> Vec<ModalityExpr> {
    (0..=DENOMINATOR)
        .map(|k| base("deq", vec![num(k as f64 / DENOMINATOR as f64)], "D"))
        .collect()
}

fn detcert_family() -> Vec<ModalityExpr> {
    LABELS.iter().map(|&r| base("detcert", vec![num(r)], "R")).collect()
}

fn boxm() -> ModalityExpr {
    base("box", vec![], "P")
}

fn pi(i: f64) -> FibMorphism {
    FibMorphism::gen("pi", vec![num(i)])
}

fn ev_box(k: &str) -> FibMorphism {
    FibMorphism::tensor(
        FibMorphism::gen("ev", vec![Param::Name(k.to_string())]),
        FibMorphism::id(obj("P")),
    )
}

fn points(n: usize) -> Vec<FunctorValue> {
    (0..n).map(FunctorValue::Base).collect()
}

fn labelled(n: usize) -> Vec<FunctorValue> {
    LABELS
        .iter()
        .flat_map(|&r| (0..n).map(move |x| FunctorValue::pair(Label::Real(r), FunctorValue::Base(x))))
        .collect()
}

fn all_subsets_of(items: &[FunctorValue]) -> Vec<FunctorValue> {
    (0..1u64 << items.len())
        .map(|m| FunctorValue::set((0..items.len()).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone())))
        .collect()
}

fn random_subset_of<R: Rng>(rng: &mut R, items: &[FunctorValue]) -> FunctorValue {
    FunctorValue::set(items.iter().filter(|_| rng.random_bool(0.4)).cloned())
}

fn check(st: &Structure, name: String, c: PropertyCheck, exec: Exec) -> Result<CaseResult, CliError> {
    Ok(CaseResult::from_report(name, check_property(st, &c, exec)?))
}

/// Lifting naturality for every catalogued modality and naturality of
/// every catalogued morphism, along all maps `2 → 2`, `3 → 2` and random
/// maps `4 → 3`.
pub fn naturality(seed: u64, exec: Exec) -> Result<Vec<CaseResult>, CliError> {
    let st = classical_structure();
    let mut rng = rng(seed);
    let mut shapes: Vec<(usize, usize, Vec<Vec<usize>>)> = vec![(2, 2, all_maps(2, 2)), (3, 2, all_maps(3, 2))];
    shapes.push((4, 3, (0..6).map(|_| random_map(&mut rng, 4, 3)).collect()));
    let mut out = Vec::new();
    for fibre in FIBRES {
        let family = fibred_core::classical::gen::modality_catalogue(fibre);
        for (n, m, maps) in &shapes {
            let samples: Vec<FunctorValue> = (0..40).map(|_| random_value(&mut rng, fibre, *n)).collect();
            out.push(check(
                &st,
                format!("liftings at {fibre}, {n} -> {m}"),
                PropertyCheck::LiftingNaturality {
                    family: family.clone(),
                    source: *n,
                    target: *m,
                    maps: maps.clone(),
                    samples,
                },
                exec,
            )?);
        }
    }
    for (f, source, _) in fibred_core::classical::gen::morphism_catalogue() {
        if f.is_identity() {
            continue;
        }
        for (n, m, maps) in &shapes {
            let samples: Vec<FunctorValue> = (0..40).map(|_| random_value(&mut rng, source, *n)).collect();
            out.push(check(
                &st,
                format!("{f}, {n} -> {m}"),
                PropertyCheck::NatNaturality {
                    morphism: f.clone(),
                    source: *n,
                    target: *m,
                    maps: maps.clone(),
                    samples,
                },
                exec,
            )?);
        }
    }
    Ok(out)
}

/// The single-qubit model on the six Pauli eigenstates.
pub fn pauli_model() -> Result<QuantumModel, CliError> {
    let mut sys = QuantumSystem::new(1)?;
    for g in ["X", "Y", "Z"] {
        sys.add_observable(Observable::new(g, gate(g)?)?)?;
    }
    let mut model = QuantumModel::new(sys);
    for s in ["0", "1", "+", "-", "+i", "-i"] {
        model.add_state(s, parse_state(s)?)?;
    }
    Ok(model)
}

/// `qdeq[p, r, A]` for `p ∈ {0, 1/2, 1}`, `r = ±1` and `A ∈ {X, Y, Z}`.
pub fn pauli_qdeq_family(model: &QuantumModel) -> Result<Vec<ModalityExpr>, CliError> {
    let st = model.structure();
    let sig = st.signature();
    let mut out = Vec::new();
    for a in ["X", "Y", "Z"] {
        for p in [0.0, 0.5, 1.0] {
            for r in [-1.0, 1.0] {
                out.push(
                    qdeq_expr(sig, num(p), num(r), Param::Name(a.to_string()))
                        .map_err(|e| CliError::Type(e.to_string()))?,
                );
            }
        }
    }
    Ok(out)
}

pub fn separation(exec: Exec) -> Result<Vec<CaseResult>, CliError> {
    let mut out = Vec::new();
    let model = pauli_model()?;
    let st = model.structure();
    let c = model.coalgebra()?;
    out.push(check(
        &st,
        "qdeq on single-qubit Pauli eigenstates".into(),
        PropertyCheck::SeparatesBySingletons {
            family: pauli_qdeq_family(&model)?,
            carrier: c.len(),
            samples: c.gamma().to_vec(),
        },
        exec,
    )?);
    let st = classical_structure();
    for n in 1..=3 {
        out.push(check(
            &st,
            format!("deq by singletons, {n} states"),
            PropertyCheck::SeparatesBySingletons {
                family: deq_family(),
                carrier: n,
                samples: enumerate_dyadic_dists(&points(n), 3, DENOMINATOR),
            },
            exec,
        )?);
        out.push(dreq_case(&st, n, enumerate_dyadic_dists(&labelled(n), 3, DENOMINATOR), exec)?);
    }
    Ok(out)
}

pub fn translation(seed: u64, instances: usize, exec: Exec) -> Result<Vec<CaseResult>, CliError> {
    let st = classical_structure();
    let mut rng = rng(seed);
    let mut result = CaseResult {
        name: format!("{instances} random (formula, morphism, coalgebra) triples"),
        checked: 0,
        counterexamples: Vec::new(),
    };
    for _ in 0..instances {
        let (formula, morphism, coalgebra) = random_translation_instance(&mut rng, 4);
        let r = check_property(
            &st,
            &PropertyCheck::TranslationSoundness {
                formula,
                morphism,
                coalgebra,
            },
            exec,
        )?;
        result.checked += 1;
        result.counterexamples.extend(r.counterexamples);
    }
    Ok(vec![result])
}

/// Membership of a union state under `□` applied to a union set; states
/// `0..n1` belong to `c1`, the rest to `c2`.
fn box_on_union(
    lifting: &CompiledModality,
    c1: &Coalgebra,
    c2: &Coalgebra,
    set: &[bool],
) -> Result<Vec<bool>, EvalError> {
    let n1 = c1.len();
    let s1 = StateSet::from_members(set[..n1].to_vec());
    let s2 = StateSet::from_members(set[n1..].to_vec());
    let mut out = Vec::with_capacity(set.len());
    for v in c1.gamma() {
        out.push(lifting.member(&[&s1 as &dyn SubsetPred], v)?);
    }
    for v in c2.gamma() {
        out.push(lifting.member(&[&s2 as &dyn SubsetPred], v)?);
    }
    Ok(out)
}

/// Checks that every formula of modal depth at most `depth` has the same
/// truth value at `x` and at `h(x)`.
///
/// The extensions of such formulas on the disjoint union of both carriers
/// form the boolean algebra generated by the boxes of the depth − 1
/// algebra, so it suffices to refine the atoms level by level and compare
/// the atoms of `x` and `h(x)`.
pub fn invariant_up_to_depth(
    st: &Structure,
    c1: &Coalgebra,
    c2: &Coalgebra,
    h: &[usize],
    depth: usize,
) -> Result<Option<String>, EvalError> {
    let lifting = CompiledModality::compile(&boxm(), st)?;
    let n1 = c1.len();
    let total = n1 + c2.len();
    let mut atom = vec![0usize; total];
    for level in 1..=depth {
        let atoms = atom.iter().max().map_or(0, |m| m + 1);
        if atoms > 20 {
            return Ok(Some(format!("{atoms} atoms at depth {level}")));
        }
        let mut signature: Vec<Vec<bool>> = vec![Vec::new(); total];
        for mask in 0u64..1 << atoms {
            let set: Vec<bool> = atom.iter().map(|&a| mask >> a & 1 == 1).collect();
            let boxed = box_on_union(&lifting, c1, c2, &set)?;
            for (x, b) in boxed.into_iter().enumerate() {
                signature[x].push(b);
            }
        }
        let mut keyed: Vec<(usize, &Vec<bool>)> = atom.iter().copied().zip(signature.iter()).collect();
        let mut distinct = keyed.clone();
        distinct.sort();
        distinct.dedup();
        atom = keyed
            .drain(..)
            .map(|k| distinct.binary_search(&k).expect("present"))
            .collect();
        for x in 0..n1 {
            if atom[x] != atom[n1 + h[x]] {
                return Ok(Some(format!(
                    "{} and its image {} differ at depth {level}",
                    c1.name(x),
                    c2.name(h[x])
                )));
            }
        }
    }
    Ok(None)
}

pub fn invariance(seed: u64, frames: usize) -> Result<Vec<CaseResult>, CliError> {
    let st = classical_structure();
    let mut rng = rng(seed);
    let mut exhaustive = CaseResult {
        name: format!("{frames} Kripke frames, all formulas of depth <= 3"),
        checked: 0,
        counterexamples: Vec::new(),
    };
    let mut sampled = CaseResult {
        name: "random formulas of depth <= 3 on the same frames".into(),
        checked: 0,
        counterexamples: Vec::new(),
    };
    for i in 0..frames {
        let n = rng.random_range(1..=8);
        let density = rng.random_range(0.1..0.6);
        let c = random_kripke(&mut rng, n, density);
        let q = behavioural_quotient(&st, &c)?;
        check_homomorphism(&st, &c, &q.coalgebra, &q.map)?;
        exhaustive.checked += 1;
        if let Some(why) = invariant_up_to_depth(&st, &c, &q.coalgebra, &q.map, 3)? {
            exhaustive.counterexamples.push(format!("frame {i}: {why}"));
        }
        for _ in 0..5 {
            let depth = rng.random_range(0..=3);
            let phi = fibred_core::classical::gen::random_formula(&mut rng, "P", depth);
            sampled.checked += 1;
            if !check_homomorphism_invariance(&phi, &st, &c, &q.coalgebra, &q.map)? {
                sampled.counterexamples.push(format!("frame {i}: `{phi}` not invariant"));
            }
        }
    }
    Ok(vec![exhaustive, sampled])
}

fn dreq_case(st: &Structure, n: usize, samples: Vec<FunctorValue>, exec: Exec) -> Result<CaseResult, CliError> {
    check(
        st,
        format!("dreq separating, {n} states"),
        PropertyCheck::ThenSeparating {
            first: detcert_family(),
            second: deq_family(),
            carrier: n,
            samples,
        },
        exec,
    )
}

fn ep_tables(n: usize) -> Vec<FunctorValue> {
    let subsets = all_subsets_of(&points(n));
    let mut out = Vec::new();
    for a in &subsets {
        for b in &subsets {
            for c in &subsets {
                out.push(FunctorValue::table(
                    KEYS.iter().zip([a, b, c]).map(|(k, s)| (Key::sym(*k), s.clone())),
                ));
            }
        }
    }
    out
}

fn tuples(n: usize) -> Vec<FunctorValue> {
    let dists = enumerate_dyadic_dists(&points(n), 3, DENOMINATOR);
    all_subsets_of(&points(n))
        .into_iter()
        .flat_map(|s| dists.iter().map(move |d| FunctorValue::Tuple(vec![s.clone(), d.clone()])))
        .collect()
}

/// Samples for one lemma instance: exhaustive for `n <= 3`, random for
/// larger carriers.
struct Samples {
    deq: Vec<FunctorValue>,
    labels: Vec<FunctorValue>,
    labelled_dists: Vec<FunctorValue>,
    tables: Vec<FunctorValue>,
    tuples: Vec<FunctorValue>,
    nested: Vec<FunctorValue>,
    labelled_sets: Vec<FunctorValue>,
}

impl Samples {
    fn exhaustive(n: usize) -> Self {
        Self {
            deq: enumerate_dyadic_dists(&points(n), 3, DENOMINATOR),
            labels: labelled(n),
            labelled_dists: enumerate_dyadic_dists(&labelled(n), 3, DENOMINATOR),
            tables: ep_tables(n),
            tuples: tuples(n),
            nested: all_subsets_of(&all_subsets_of(&points(n))),
            labelled_sets: all_subsets_of(&labelled(n)),
        }
    }

    fn random(rng: &mut GenRng, n: usize, count: usize) -> Self {
        let subsets = all_subsets_of(&points(n));
        Self {
            deq: (0..count).map(|_| random_dyadic_dist(rng, &points(n), 3, DENOMINATOR)).collect(),
            labels: labelled(n),
            labelled_dists: (0..count)
                .map(|_| random_dyadic_dist(rng, &labelled(n), 3, DENOMINATOR))
                .collect(),
            tables: (0..count).map(|_| random_value(rng, "E*P", n)).collect(),
            tuples: (0..count).map(|_| random_value(rng, "T", n)).collect(),
            nested: (0..count).map(|_| random_subset_of(rng, &subsets)).collect(),
            labelled_sets: (0..count).map(|_| random_subset_of(rng, &labelled(n))).collect(),
        }
    }
}

fn lemma_cases(st: &Structure, n: usize, s: Samples, tag: &str, exec: Exec) -> Result<Vec<CaseResult>, CliError> {
    let mut out = Vec::new();
    out.push(check(
        st,
        format!("deq separates by singletons, {tag}"),
        PropertyCheck::SeparatesBySingletons {
            family: deq_family(),
            carrier: n,
            samples: s.deq,
        },
        exec,
    )?);
    out.push(check(
        st,
        format!("detcert monotone, {tag}"),
        PropertyCheck::Monotone {
            family: detcert_family(),
            carrier: n,
            samples: s.labels.clone(),
        },
        exec,
    )?);
    out.push(check(
        st,
        format!("detcert mutually surjective on singletons, {tag}"),
        PropertyCheck::MutuallySurjectiveOnSingletons {
            family: detcert_family(),
            carrier: n,
            domain: s.labels,
        },
        exec,
    )?);
    let mut dreq = dreq_case(st, n, s.labelled_dists, exec)?;
    dreq.name = format!("dreq separating, {tag}");
    out.push(dreq);
    out.push(check(
        st,
        format!("evalsep: box^(ev[k] * id) separating, {tag}"),
        PropertyCheck::SuperscriptSeparating {
            family: vec![boxm()],
            morphisms: KEYS.iter().map(|k| ev_box(k)).collect(),
            carrier: n,
            samples: s.tables,
        },
        exec,
    )?);
    let mut prod = vec![ModalityExpr::superscript(boxm(), pi(0.0))];
    prod.extend(deq_family().into_iter().map(|d| ModalityExpr::superscript(d, pi(1.0))));
    out.push(check(
        st,
        format!("prod: box^pi[0], deq^pi[1] separating, {tag}"),
        PropertyCheck::Separating {
            family: prod,
            carrier: n,
            samples: s.tuples,
        },
        exec,
    )?);
    out.push(check(
        st,
        format!("box . box monotone, {tag}"),
        PropertyCheck::ThenMonotone {
            first: vec![boxm()],
            second: vec![boxm()],
            carrier: n,
            samples: s.nested,
        },
        exec,
    )?);
    out.push(check(
        st,
        format!("detcert . box monotone, {tag}"),
        PropertyCheck::ThenMonotone {
            first: detcert_family(),
            second: vec![boxm()],
            carrier: n,
            samples: s.labelled_sets,
        },
        exec,
    )?);
    Ok(out)
}

/// Exhaustive on carriers of at most 3 states, plus `random` samples on a
/// 5-state carrier.
pub fn lemmas(seed: u64, random: usize, exec: Exec) -> Result<Vec<CaseResult>, CliError> {
    let st = classical_structure();
    let mut out = Vec::new();
    for n in 1..=3 {
        out.extend(lemma_cases(&st, n, Samples::exhaustive(n), &format!("{n} states"), exec)?);
    }
    let mut rng = rng(seed);
    let samples = Samples::random(&mut rng, 5, random);
    out.extend(lemma_cases(&st, 5, samples, &format!("{random} samples on 5 states"), exec)?);
    Ok(out)
}
