use std::fmt;

use super::coalgebra::Coalgebra;
use super::eval::{eval_formula_with, CompiledModality};
use super::structure::{state_map, StateSet, Structure, SubsetPred};
use super::value::{FunctorValue, StateId};
use crate::error::EvalError;
use crate::par::Exec;
use crate::signature::FibMorphism;
use crate::syntax::{translate, Formula, ModalityExpr};

/// A finite instance of a lifting or translation property.
///
/// Families are lists of unary modality expressions over the structure;
/// subsets range over all subsets of the carrier `{0, …, carrier-1}`
/// (at most 16 states).
#[derive(Clone, Debug)]
pub enum PropertyCheck {
    /// `U ⊆ V` implies `λ(U) ⊆ λ(V)` on the samples.
    Monotone {
        family: Vec<ModalityExpr>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// Distinct samples are told apart by some lifting and subset.
    Separating {
        family: Vec<ModalityExpr>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// As `Separating`, using singleton subsets only.
    SeparatesBySingletons {
        family: Vec<ModalityExpr>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// Every `t` of the (completely enumerated) `domain` is the sole
    /// element of some `λ(U)`.
    MutuallySurjectiveOnSingletons {
        family: Vec<ModalityExpr>,
        carrier: usize,
        domain: Vec<FunctorValue>,
    },
    /// Separation by all composites `first · second`.
    ThenSeparating {
        first: Vec<ModalityExpr>,
        second: Vec<ModalityExpr>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// Monotonicity of all composites `first · second`.
    ThenMonotone {
        first: Vec<ModalityExpr>,
        second: Vec<ModalityExpr>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// Separation by all `λ^f` for `λ` in the family and `f` listed.
    SuperscriptSeparating {
        family: Vec<ModalityExpr>,
        morphisms: Vec<FibMorphism>,
        carrier: usize,
        samples: Vec<FunctorValue>,
    },
    /// `v ∈ λ_X(h⁻¹V)` iff `⟦A⟧(h)(v) ∈ λ_Y(V)` for each listed `h: X → Y`.
    LiftingNaturality {
        family: Vec<ModalityExpr>,
        source: usize,
        target: usize,
        maps: Vec<Vec<StateId>>,
        samples: Vec<FunctorValue>,
    },
    /// `f_Y ∘ ⟦A⟧(h) = ⟦B⟧(h) ∘ f_X` on the samples.
    NatNaturality {
        morphism: FibMorphism,
        source: usize,
        target: usize,
        maps: Vec<Vec<StateId>>,
        samples: Vec<FunctorValue>,
    },
    /// `⟦φ⟧_{X, ⟦f⟧∘γ} = ⟦τ_f(φ)⟧_{X, γ}`.
    TranslationSoundness {
        formula: Formula,
        morphism: FibMorphism,
        coalgebra: Coalgebra,
    },
}

impl PropertyCheck {
    pub fn kind(&self) -> &'static str {
        match self {
            PropertyCheck::Monotone { .. } => "monotone",
            PropertyCheck::Separating { .. } => "separating",
            PropertyCheck::SeparatesBySingletons { .. } => "separates_by_singletons",
            PropertyCheck::MutuallySurjectiveOnSingletons { .. } => "mutually_surjective_on_singletons",
            PropertyCheck::ThenSeparating { .. } => "then_separating",
            PropertyCheck::ThenMonotone { .. } => "then_monotone",
            PropertyCheck::SuperscriptSeparating { .. } => "superscript_separating",
            PropertyCheck::LiftingNaturality { .. } | PropertyCheck::NatNaturality { .. } => "naturality",
            PropertyCheck::TranslationSoundness { .. } => "translation_soundness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub kind: &'static str,
    /// Number of elementary comparisons performed.
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn new(kind: &'static str) -> Self {
        Self {
            kind,
            checked: 0,
            counterexamples: Vec::new(),
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} checks, {} counterexample(s))",
            self.kind,
            if self.passed() { "ok" } else { "FAILED" },
            self.checked,
            self.counterexamples.len()
        )
    }
}

const MAX_CARRIER: usize = 16;

fn compile_unary(family: &[ModalityExpr], st: &Structure) -> Result<Vec<CompiledModality>, EvalError> {
    family
        .iter()
        .map(|e| {
            let c = CompiledModality::compile(e, st)?;
            if c.ty().arity != 1 {
                return Err(EvalError::shape(format!("unary modality `{e}`"), format!("arity {}", c.ty().arity)));
            }
            Ok(c)
        })
        .collect()
}

fn check_carrier(n: usize) -> Result<(), EvalError> {
    if n == 0 || n > MAX_CARRIER {
        return Err(EvalError::shape(format!("carrier of 1..={MAX_CARRIER} states"), n.to_string()));
    }
    Ok(())
}

/// `table[s][l]` is the set of masks `U` with `samples[s] ∈ λ_l(U)`, as a
/// bit vector indexed by mask.
fn membership_table(
    family: &[CompiledModality],
    n: usize,
    masks: &[u64],
    samples: &[FunctorValue],
    exec: Exec,
) -> Result<Vec<Vec<Vec<bool>>>, EvalError> {
    let subsets: Vec<StateSet> = masks.iter().map(|&m| StateSet::from_mask(n, m)).collect();
    exec.try_map_range(samples.len(), |s| {
        family
            .iter()
            .map(|l| {
                subsets
                    .iter()
                    .map(|u| l.member(&[u as &dyn SubsetPred], &samples[s]))
                    .collect::<Result<Vec<bool>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
    })
}

fn all_masks(n: usize) -> Vec<u64> {
    (0..1u64 << n).collect()
}

fn singleton_masks(n: usize) -> Vec<u64> {
    (0..n).map(|i| 1u64 << i).collect()
}

fn monotone(
    report: &mut PropertyReport,
    family: &[ModalityExpr],
    st: &Structure,
    n: usize,
    samples: &[FunctorValue],
    exec: Exec,
) -> Result<(), EvalError> {
    check_carrier(n)?;
    let compiled = compile_unary(family, st)?;
    let masks = all_masks(n);
    let table = membership_table(&compiled, n, &masks, samples, exec)?;
    for (s, rows) in table.iter().enumerate() {
        for (l, row) in rows.iter().enumerate() {
            for &u in &masks {
                for &v in &masks {
                    if u & !v != 0 {
                        continue;
                    }
                    report.checked += 1;
                    if row[u as usize] && !row[v as usize] {
                        report.counterexamples.push(format!(
                            "`{}` not monotone at {}: member for {} but not for {}",
                            family[l],
                            samples[s],
                            StateSet::from_mask(n, u),
                            StateSet::from_mask(n, v)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn separating(
    report: &mut PropertyReport,
    family: &[ModalityExpr],
    st: &Structure,
    n: usize,
    masks: &[u64],
    samples: &[FunctorValue],
    exec: Exec,
) -> Result<(), EvalError> {
    check_carrier(n)?;
    let compiled = compile_unary(family, st)?;
    let mut distinct: Vec<FunctorValue> = samples.to_vec();
    distinct.sort();
    distinct.dedup();
    let table = membership_table(&compiled, n, masks, &distinct, exec)?;
    let mut order: Vec<usize> = (0..distinct.len()).collect();
    order.sort_by(|&a, &b| table[a].cmp(&table[b]));
    let pairs = distinct.len() * distinct.len().saturating_sub(1) / 2;
    report.checked += pairs;
    for w in order.windows(2) {
        if table[w[0]] == table[w[1]] {
            report.counterexamples.push(format!(
                "{} and {} are not separated",
                distinct[w[0]], distinct[w[1]]
            ));
        }
    }
    Ok(())
}

fn mutually_surjective(
    report: &mut PropertyReport,
    family: &[ModalityExpr],
    st: &Structure,
    n: usize,
    domain: &[FunctorValue],
    exec: Exec,
) -> Result<(), EvalError> {
    check_carrier(n)?;
    let compiled = compile_unary(family, st)?;
    let mut distinct: Vec<FunctorValue> = domain.to_vec();
    distinct.sort();
    distinct.dedup();
    let masks = all_masks(n);
    let table = membership_table(&compiled, n, &masks, &distinct, exec)?;
    let mut covered = vec![false; distinct.len()];
    for l in 0..compiled.len() {
        for m in 0..masks.len() {
            let members: Vec<usize> = (0..distinct.len()).filter(|&t| table[t][l][m]).collect();
            if let [t] = members.as_slice() {
                covered[*t] = true;
            }
        }
    }
    report.checked += distinct.len();
    for (t, ok) in covered.iter().enumerate() {
        if !ok {
            report
                .counterexamples
                .push(format!("{{{}}} is not the image of any lifting", distinct[t]));
        }
    }
    Ok(())
}

fn then_family(first: &[ModalityExpr], second: &[ModalityExpr]) -> Vec<ModalityExpr> {
    first
        .iter()
        .flat_map(|a| second.iter().map(move |b| ModalityExpr::then(a.clone(), b.clone())))
        .collect()
}

fn lifting_naturality(
    report: &mut PropertyReport,
    family: &[ModalityExpr],
    st: &Structure,
    (n, m): (usize, usize),
    maps: &[Vec<StateId>],
    samples: &[FunctorValue],
    exec: Exec,
) -> Result<(), EvalError> {
    check_carrier(n)?;
    check_carrier(m)?;
    let compiled = compile_unary(family, st)?;
    for h in maps {
        if h.len() != n || h.iter().any(|&y| y >= m) {
            return Err(EvalError::shape(format!("map from {n} to {m} states"), format!("{h:?}")));
        }
        for (l, lifting) in compiled.iter().enumerate() {
            let lift = st.lift_map(&lifting.ty().fibre, state_map(h))?;
            let results = exec.try_map_range(samples.len(), |s| {
                let v = &samples[s];
                let image = lift(v)?;
                let mut bad = Vec::new();
                for mask in all_masks(m) {
                    let target = StateSet::from_mask(m, mask);
                    let source = target.preimage(h);
                    let lhs = lifting.member(&[&source as &dyn SubsetPred], v)?;
                    let rhs = lifting.member(&[&target as &dyn SubsetPred], &image)?;
                    if lhs != rhs {
                        bad.push(format!(
                            "`{}` not natural for h = {h:?} at {v} with V = {target}",
                            family[l]
                        ));
                    }
                }
                Ok::<_, EvalError>(bad)
            })?;
            report.checked += samples.len() << m;
            report.counterexamples.extend(results.into_iter().flatten());
        }
    }
    Ok(())
}

fn nat_naturality(
    report: &mut PropertyReport,
    morphism: &FibMorphism,
    st: &Structure,
    (n, m): (usize, usize),
    maps: &[Vec<StateId>],
    samples: &[FunctorValue],
    exec: Exec,
) -> Result<(), EvalError> {
    let nat = st.nat_trans(morphism)?;
    for h in maps {
        if h.len() != n || h.iter().any(|&y| y >= m) {
            return Err(EvalError::shape(format!("map from {n} to {m} states"), format!("{h:?}")));
        }
        let lift_source = st.lift_map(&nat.source, state_map(h))?;
        let lift_target = st.lift_map(&nat.target, state_map(h))?;
        let results = exec.try_map_range(samples.len(), |s| {
            let v = &samples[s];
            let lhs = nat.apply(&lift_source(v)?)?;
            let rhs = lift_target(&nat.apply(v)?)?;
            Ok::<_, EvalError>(if lhs.approx_eq(&rhs, st.eps()) {
                None
            } else {
                Some(format!("`{morphism}` not natural for h = {h:?} at {v}: {lhs} vs {rhs}"))
            })
        })?;
        report.checked += samples.len();
        report.counterexamples.extend(results.into_iter().flatten());
    }
    Ok(())
}

/// Runs a property check and lists its counterexamples. Errors signal a
/// malformed instance (ill-typed family, shape mismatch), not a failure.
pub fn check_property(st: &Structure, check: &PropertyCheck, exec: Exec) -> Result<PropertyReport, EvalError> {
    let mut report = PropertyReport::new(check.kind());
    match check {
        PropertyCheck::Monotone {
            family,
            carrier,
            samples,
        } => monotone(&mut report, family, st, *carrier, samples, exec)?,
        PropertyCheck::Separating {
            family,
            carrier,
            samples,
        } => separating(&mut report, family, st, *carrier, &all_masks(*carrier), samples, exec)?,
        PropertyCheck::SeparatesBySingletons {
            family,
            carrier,
            samples,
        } => separating(&mut report, family, st, *carrier, &singleton_masks(*carrier), samples, exec)?,
        PropertyCheck::MutuallySurjectiveOnSingletons {
            family,
            carrier,
            domain,
        } => mutually_surjective(&mut report, family, st, *carrier, domain, exec)?,
        PropertyCheck::ThenSeparating {
            first,
            second,
            carrier,
            samples,
        } => separating(
            &mut report,
            &then_family(first, second),
            st,
            *carrier,
            &all_masks(*carrier),
            samples,
            exec,
        )?,
        PropertyCheck::ThenMonotone {
            first,
            second,
            carrier,
            samples,
        } => monotone(&mut report, &then_family(first, second), st, *carrier, samples, exec)?,
        PropertyCheck::SuperscriptSeparating {
            family,
            morphisms,
            carrier,
            samples,
        } => {
            let composed: Vec<ModalityExpr> = family
                .iter()
                .flat_map(|l| morphisms.iter().map(move |f| ModalityExpr::superscript(l.clone(), f.clone())))
                .collect();
            separating(&mut report, &composed, st, *carrier, &all_masks(*carrier), samples, exec)?
        }
        PropertyCheck::LiftingNaturality {
            family,
            source,
            target,
            maps,
            samples,
        } => lifting_naturality(&mut report, family, st, (*source, *target), maps, samples, exec)?,
        PropertyCheck::NatNaturality {
            morphism,
            source,
            target,
            maps,
            samples,
        } => nat_naturality(&mut report, morphism, st, (*source, *target), maps, samples, exec)?,
        PropertyCheck::TranslationSoundness {
            formula,
            morphism,
            coalgebra,
        } => {
            let (_, target) = st.signature().morphism_type(morphism)?;
            let f = st.morphism_map(morphism)?;
            let gamma = exec.try_map_range(coalgebra.len(), |x| f(&coalgebra.gamma()[x]))?;
            let adapted = coalgebra.restructured(target, gamma)?;
            let lhs = eval_formula_with(formula, st, &adapted, exec)?;
            let translated = translate(morphism, formula, st.signature())?;
            let rhs = eval_formula_with(&translated, st, coalgebra, exec)?;
            report.checked += coalgebra.len();
            if lhs != rhs {
                report.counterexamples.push(format!(
                    "translation along `{morphism}` of `{formula}` gives {rhs}, adapted coalgebra gives {lhs}"
                ));
            }
        }
    }
    Ok(report)
}
