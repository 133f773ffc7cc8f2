use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fibred_core::classical::gen::{random_coalgebra, random_kripke, rng};
use fibred_core::classical::{classical_structure, obj};
use fibred_core::par::Exec;
use fibred_core::semantics::{check_property, eval_formula_with, PropertyCheck};
use fibred_core::syntax::parse_formula_at;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kripke_eval(c: &mut Criterion) {
    let st = classical_structure();
    let phi = parse_formula_at("box(box(!box(box(false)))) & !box(false)", st.signature(), Some(&obj("P"))).unwrap();
    let mut group = c.benchmark_group("kripke_eval");
    for n in [500, 2000] {
        let k = random_kripke(&mut rng(1), n, 8.0 / n as f64);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &k, |b, k| {
                b.iter(|| eval_formula_with(black_box(&phi), &st, k, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn distribution_eval(c: &mut Criterion) {
    let st = classical_structure();
    let mut group = c.benchmark_group("labelled_distribution_eval");
    let coalgebra = random_coalgebra(&mut rng(2), "D*R", 1000);
    let phi = parse_formula_at(
        "dreq[0.5, 1](!dreq[0.25, 0](dreq[1, 1](true))) & !dreq[0, 0](dreq[0.5, 1](true))",
        st.signature(),
        Some(&obj("D*R")),
    )
    .unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| eval_formula_with(black_box(&phi), &st, &coalgebra, exec).unwrap()));
    }
    group.finish();
}

fn separation_check(c: &mut Criterion) {
    let st = classical_structure();
    let samples = fibred_core::classical::gen::enumerate_dyadic_dists(
        &(0..4).map(fibred_core::semantics::FunctorValue::Base).collect::<Vec<_>>(),
        3,
        8,
    );
    let check = PropertyCheck::SeparatesBySingletons {
        family: fibred_core::classical::gen::modality_catalogue("D"),
        carrier: 4,
        samples,
    };
    let mut group = c.benchmark_group("deq_separation");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| check_property(&st, black_box(&check), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, kripke_eval, distribution_eval, separation_check);
criterion_main!(benches);
