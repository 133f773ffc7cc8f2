//! Seeded random and exhaustive instances over the classical structure:
//! coalgebras, dyadic distributions, morphisms and formulae.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::obj;
use crate::semantics::{Coalgebra, FunctorValue, Key, Label};
use crate::signature::{FibMorphism, Param};
use crate::syntax::{Formula, ModalityExpr};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fibres with generators below.
pub const FIBRES: [&str; 5] = ["P", "D", "D*R", "E*P", "T"];
/// Keys of the exponent `E`.
pub const KEYS: [&str; 3] = ["a", "b", "c"];
/// Outcome labels used for `R`; integers keep label comparison exact.
pub const LABELS: [f64; 2] = [0.0, 1.0];
/// Denominator of generated dyadic masses.
pub const DENOMINATOR: u32 = 8;

pub fn random_subset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FunctorValue {
    FunctorValue::states((0..n).filter(|_| rng.random_bool(density)))
}

/// Positive integer parts summing to `total`.
fn random_composition<R: Rng>(rng: &mut R, total: u32, parts: usize) -> Vec<u32> {
    let mut cuts: Vec<u32> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u32> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// A distribution over at most `max_support` of `points` with masses in
/// multiples of `1/denominator`.
pub fn random_dyadic_dist<R: Rng>(
    rng: &mut R,
    points: &[FunctorValue],
    max_support: usize,
    denominator: u32,
) -> FunctorValue {
    let limit = max_support.min(points.len()).min(denominator as usize).max(1);
    let k = rng.random_range(1..=limit);
    let chosen: Vec<&FunctorValue> = points.choose_multiple(rng, k).collect();
    let parts = random_composition(rng, denominator, k);
    FunctorValue::dist(
        chosen
            .into_iter()
            .zip(parts)
            .map(|(v, c)| (v.clone(), c as f64 / denominator as f64)),
    )
    .expect("dyadic masses sum to one")
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts as u32 - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn subsets_of_size<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<T>> = subsets_of_size(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0].clone());
            s
        })
        .collect();
    with.extend(subsets_of_size(&items[1..], k));
    with
}

/// Every distribution over at most `max_support` of `points` with masses in
/// multiples of `1/denominator`.
pub fn enumerate_dyadic_dists(points: &[FunctorValue], max_support: usize, denominator: u32) -> Vec<FunctorValue> {
    let mut out = Vec::new();
    for k in 1..=max_support.min(points.len()) {
        for support in subsets_of_size(points, k) {
            for parts in compositions(denominator, k) {
                out.push(
                    FunctorValue::dist(
                        support
                            .iter()
                            .zip(&parts)
                            .map(|(v, c)| (v.clone(), *c as f64 / denominator as f64)),
                    )
                    .expect("dyadic masses sum to one"),
                );
            }
        }
    }
    out
}

/// Every function `{0..n} → {0..m}` as an index map.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |y| {
                    let mut next = prefix.clone();
                    next.push(y);
                    next
                })
            })
            .collect();
    }
    out
}

pub fn random_map<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..m)).collect()
}

fn base_points(n: usize) -> Vec<FunctorValue> {
    (0..n).map(FunctorValue::Base).collect()
}

fn labelled_points(n: usize) -> Vec<FunctorValue> {
    LABELS
        .iter()
        .flat_map(|&r| (0..n).map(move |x| FunctorValue::pair(Label::Real(r), FunctorValue::Base(x))))
        .collect()
}

/// A random element of `⟦fibre⟧({0..n})` for one of [`FIBRES`].
pub fn random_value<R: Rng>(rng: &mut R, fibre: &str, n: usize) -> FunctorValue {
    match fibre {
        "P" => random_subset(rng, n, 0.35),
        "D" => random_dyadic_dist(rng, &base_points(n), 3, DENOMINATOR),
        "D*R" => random_dyadic_dist(rng, &labelled_points(n), 3, DENOMINATOR),
        "E*P" => FunctorValue::table(KEYS.iter().map(|k| (Key::sym(*k), random_subset(rng, n, 0.3)))),
        "T" => FunctorValue::Tuple(vec![
            random_subset(rng, n, 0.35),
            random_dyadic_dist(rng, &base_points(n), 3, DENOMINATOR),
        ]),
        other => panic!("no generator for fibre {other}"),
    }
}

pub fn random_coalgebra<R: Rng>(rng: &mut R, fibre: &str, n: usize) -> Coalgebra {
    let gamma = (0..n).map(|_| random_value(rng, fibre, n)).collect();
    Coalgebra::indexed(obj(fibre), gamma).expect("generated values stay in the carrier")
}

/// A Kripke frame with edge probability `density`.
pub fn random_kripke<R: Rng>(rng: &mut R, n: usize, density: f64) -> Coalgebra {
    let gamma = (0..n).map(|_| random_subset(rng, n, density)).collect();
    Coalgebra::indexed(obj("P"), gamma).expect("generated values stay in the carrier")
}

/// A labelled transition system over `keys`.
pub fn random_lts<R: Rng>(rng: &mut R, n: usize, keys: &[&str], density: f64) -> Coalgebra {
    let gamma = (0..n)
        .map(|_| FunctorValue::table(keys.iter().map(|k| (Key::sym(*k), random_subset(rng, n, density)))))
        .collect();
    Coalgebra::new(obj("E*P"), (0..n).map(|i| format!("s{i}")).collect(), gamma)
        .expect("generated values stay in the carrier")
}

fn num(x: f64) -> Param {
    Param::Num(x)
}

fn name(s: &str) -> Param {
    Param::Name(s.to_string())
}

fn base(symbol: &str, params: Vec<Param>, fibre: &str) -> ModalityExpr {
    ModalityExpr::base(symbol, params, obj(fibre))
}

fn supp_after_snd() -> FibMorphism {
    FibMorphism::Compose(Box::new(FibMorphism::gen("supp", vec![])), Box::new(forget_labels()))
}

fn forget_labels() -> FibMorphism {
    FibMorphism::tensor(FibMorphism::id(obj("D")), FibMorphism::gen("snd", vec![]))
}

fn ev_box_morphism(k: &str) -> FibMorphism {
    FibMorphism::tensor(FibMorphism::gen("ev", vec![name(k)]), FibMorphism::id(obj("P")))
}

const PROBS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Unary modality expressions available at `fibre`.
pub fn modality_catalogue(fibre: &str) -> Vec<ModalityExpr> {
    let boxm = || base("box", vec![], "P");
    let deq = |p: f64| base("deq", vec![num(p)], "D");
    match fibre {
        "P" => vec![boxm()],
        "D" => PROBS.iter().map(|&p| deq(p)).collect(),
        "D*R" => {
            let mut out: Vec<ModalityExpr> = PROBS
                .iter()
                .flat_map(|&p| {
                    LABELS
                        .iter()
                        .map(move |&r| ModalityExpr::then(base("detcert", vec![num(r)], "R"), deq(p)))
                })
                .collect();
            out.push(ModalityExpr::superscript(deq(0.5), forget_labels()));
            out.push(ModalityExpr::superscript(boxm(), supp_after_snd()));
            out
        }
        "E*P" => KEYS
            .iter()
            .map(|k| ModalityExpr::superscript(boxm(), ev_box_morphism(k)))
            .collect(),
        "T" => {
            let pi = |i: f64| FibMorphism::gen("pi", vec![num(i)]);
            let mut out = vec![ModalityExpr::superscript(boxm(), pi(0.0))];
            out.extend(PROBS.iter().map(|&p| ModalityExpr::superscript(deq(p), pi(1.0))));
            out.push(ModalityExpr::superscript(
                boxm(),
                FibMorphism::Compose(Box::new(FibMorphism::gen("supp", vec![])), Box::new(pi(1.0))),
            ));
            out
        }
        other => panic!("no modalities catalogued for fibre {other}"),
    }
}

/// Morphisms between catalogued fibres as `(f, source, target)`.
pub fn morphism_catalogue() -> Vec<(FibMorphism, &'static str, &'static str)> {
    let pi = |i: f64| FibMorphism::gen("pi", vec![num(i)]);
    let mut out: Vec<(FibMorphism, &'static str, &'static str)> =
        FIBRES.iter().map(|f| (FibMorphism::id(obj(f)), *f, *f)).collect();
    out.extend(KEYS.iter().map(|k| (ev_box_morphism(k), "E*P", "P")));
    out.push((pi(0.0), "T", "P"));
    out.push((pi(1.0), "T", "D"));
    out.push((
        FibMorphism::Compose(Box::new(FibMorphism::gen("supp", vec![])), Box::new(pi(1.0))),
        "T",
        "P",
    ));
    out.push((FibMorphism::gen("supp", vec![]), "D", "P"));
    out.push((forget_labels(), "D*R", "D"));
    out.push((supp_after_snd(), "D*R", "P"));
    out
}

fn random_modality<R: Rng>(rng: &mut R, fibre: &str) -> ModalityExpr {
    let catalogue = modality_catalogue(fibre);
    let pick = |rng: &mut R| catalogue.choose(rng).expect("nonempty catalogue").clone();
    match rng.random_range(0..10) {
        0 | 1 => ModalityExpr::neg(pick(rng)),
        2 => ModalityExpr::Conj(vec![pick(rng), pick(rng)]),
        _ => pick(rng),
    }
}

/// A random formula of type `fibre` with modal depth at most `depth`;
/// adaptations move between catalogued fibres.
pub fn random_formula<R: Rng>(rng: &mut R, fibre: &str, depth: usize) -> Formula {
    random_formula_fuel(rng, fibre, depth, &mut 12)
}

fn random_formula_fuel<R: Rng>(rng: &mut R, fibre: &str, depth: usize, fuel: &mut usize) -> Formula {
    if *fuel == 0 {
        return Formula::top(obj(fibre));
    }
    *fuel -= 1;
    let choice = rng.random_range(0..8);
    match choice {
        0 => Formula::top(obj(fibre)),
        1 => Formula::not(random_formula_fuel(rng, fibre, depth, fuel)),
        2 => Formula::Conj(vec![
            random_formula_fuel(rng, fibre, depth, fuel),
            random_formula_fuel(rng, fibre, depth, fuel),
        ]),
        3 => {
            let options: Vec<_> = morphism_catalogue().into_iter().filter(|(_, s, _)| *s == fibre).collect();
            let (f, _, target) = options.choose(rng).expect("identity always available").clone();
            Formula::adapt(f, random_formula_fuel(rng, target, depth, fuel))
        }
        _ if depth == 0 => {
            if rng.random_bool(0.5) {
                Formula::top(obj(fibre))
            } else {
                Formula::bottom(obj(fibre))
            }
        }
        _ => Formula::apply(
            random_modality(rng, fibre),
            vec![random_formula_fuel(rng, fibre, depth - 1, fuel)],
        ),
    }
}

/// A random `(φ, f, (X, γ))` with `f: A → B`, `φ : B` of modal depth at
/// most 3 and `γ` of type `A` on at most `max_states` states.
pub fn random_translation_instance<R: Rng>(rng: &mut R, max_states: usize) -> (Formula, FibMorphism, Coalgebra) {
    let catalogue = morphism_catalogue();
    let (f, source, target) = catalogue.choose(rng).expect("nonempty catalogue").clone();
    let depth = rng.random_range(0..=3);
    let phi = random_formula(rng, target, depth);
    let n = rng.random_range(1..=max_states);
    let c = random_coalgebra(rng, source, n);
    (phi, f, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_structure;
    use crate::syntax::type_of_formula;

    #[test]
    fn dyadic_enumeration_counts() {
        let pts = base_points(3);
        // 3 point masses, 3 pairs * 7 splits, 21 three-way splits
        assert_eq!(enumerate_dyadic_dists(&pts, 3, 8).len(), 3 + 21 + 21);
    }

    #[test]
    fn all_maps_counts() {
        assert_eq!(all_maps(3, 2).len(), 8);
        assert_eq!(all_maps(0, 2), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn generated_formulas_are_well_typed() {
        let st = classical_structure();
        let mut r = rng(7);
        for _ in 0..200 {
            let fibre = *FIBRES.choose(&mut r).unwrap();
            let phi = random_formula(&mut r, fibre, 3);
            assert_eq!(type_of_formula(&phi, st.signature()).unwrap(), obj(fibre));
            assert!(phi.modal_depth() <= 3);
        }
    }

    #[test]
    fn catalogued_morphisms_are_typed_as_listed() {
        let st = classical_structure();
        for (f, s, t) in morphism_catalogue() {
            assert_eq!(st.signature().morphism_type(&f).unwrap(), (obj(s), obj(t)), "{f}");
        }
    }
}
