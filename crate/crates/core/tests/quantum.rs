use fibred_core::par::Exec;
use fibred_core::quantum::{bell_state, gate, parse_state, random_state, Observable, PureState, QuantumModel, QuantumSystem};
use fibred_core::syntax::parse_formula_at;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdicts(model: &QuantumModel, text: &str) -> Vec<Option<bool>> {
    let st = model.structure();
    let fibre = st.signature().expand_object(&model.fibre()).unwrap();
    let phi = parse_formula_at(text, st.signature(), Some(&fibre)).unwrap();
    model.check(&phi, Exec::default()).unwrap().initial_verdicts().to_vec()
}

fn two_qubits(state: PureState) -> QuantumModel {
    let mut sys = QuantumSystem::new(2).unwrap();
    sys.add_observable(Observable::new("Z", gate("Z").unwrap()).unwrap()).unwrap();
    sys.add_observable(Observable::of_state("zero", &parse_state("0").unwrap()).unwrap()).unwrap();
    sys.add_observable(Observable::of_state("one", &parse_state("1").unwrap()).unwrap()).unwrap();
    sys.add_restriction("Alice", vec![1]).unwrap();
    sys.add_restriction("Bob", vec![2]).unwrap();
    let mut m = QuantumModel::new(sys);
    m.add_state("init", state).unwrap();
    m
}

#[test]
fn alice_measuring_bell_one_fixes_bob() {
    let m = two_qubits(bell_state(1).unwrap());
    assert_eq!(verdicts(&m, "certain[1, Z]^Alice(Bob(zero))"), [Some(true)]);
    assert_eq!(verdicts(&m, "certain[-1, Z]^Alice(Bob(one))"), [Some(true)]);
    assert_eq!(verdicts(&m, "certain[1, Z]^Alice(Bob(one))"), [Some(false)]);
    assert_eq!(verdicts(&m, "qdeq[0.5, 1, Z]^Alice(true)"), [Some(true)]);
    assert_eq!(verdicts(&m, "Bob(zero) | Bob(one)"), [Some(false)]);
}

fn one_qubit(state: PureState, target: PureState) -> QuantumModel {
    let mut sys = QuantumSystem::new(1).unwrap();
    sys.add_observable(Observable::new("Z", gate("Z").unwrap()).unwrap()).unwrap();
    sys.add_observable(Observable::of_state("t", &target).unwrap()).unwrap();
    for g in ["X", "H"] {
        sys.add_unitary(g, gate(g).unwrap()).unwrap();
    }
    sys.add_unitary("XH", fibred_core::quantum::parse_gate_expr("X.H").unwrap()).unwrap();
    let mut m = QuantumModel::new(sys);
    m.add_state("psi", state).unwrap();
    m
}

#[test]
fn unitary_adaptations() {
    let zero = parse_state("0").unwrap();
    assert_eq!(verdicts(&one_qubit(zero.clone(), parse_state("+").unwrap()), "U[H](t)"), [Some(true)]);
    assert_eq!(verdicts(&one_qubit(zero.clone(), parse_state("1").unwrap()), "U[X](t)"), [Some(true)]);
    assert_eq!(verdicts(&one_qubit(zero.clone(), parse_state("0").unwrap()), "U[X](t)"), [Some(false)]);
    // The outer adaptation acts first: X(H|0>) = |+>.
    assert_eq!(verdicts(&one_qubit(zero.clone(), parse_state("+").unwrap()), "U[H](U[X](t))"), [Some(true)]);
    assert_eq!(verdicts(&one_qubit(zero, parse_state("-").unwrap()), "U[H](U[X](t))"), [Some(false)]);
}

fn apply(g: &str, s: &PureState) -> PureState {
    PureState::normalized(gate(g).unwrap().apply(s.amplitudes()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adaptations_compose_like_the_product(seed in any::<u64>()) {
        let psi = random_state(&mut ChaCha8Rng::seed_from_u64(seed), 1);
        let target = apply("X", &apply("H", &psi));
        let m = one_qubit(psi, target);
        prop_assert_eq!(verdicts(&m, "U[XH](t)"), [Some(true)]);
        prop_assert_eq!(verdicts(&m, "U[H](U[X](t))"), [Some(true)]);
    }

    #[test]
    fn measurement_is_repeatable(seed in any::<u64>()) {
        let psi = random_state(&mut ChaCha8Rng::seed_from_u64(seed), 1);
        let m = one_qubit(psi, parse_state("0").unwrap());
        prop_assert_eq!(verdicts(&m, "certain[1, Z](P[Z]) & certain[-1, Z](!P[Z])"), [Some(true)]);
        prop_assert_eq!(verdicts(&m, "certain[1, Z](certain[1, Z](true) & qdeq[1, 1, Z](true))"), [Some(true)]);
    }

    #[test]
    fn outcome_probabilities_sum_to_one(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(&mut r, k);
        let phi = random_state(&mut r, k);
        let obs = Observable::of_state("phi", &phi).unwrap();
        let branches = obs.measure(&psi, 0.0).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let p1 = branches.iter().find(|b| b.value == 1.0).map_or(0.0, |b| b.probability);
        prop_assert!((p1 - psi.overlap(&phi).powi(2)).abs() < 1e-9);
    }
}
