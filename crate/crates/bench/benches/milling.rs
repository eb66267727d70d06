use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use millopt::es::{Engine, EsConfig};
use millopt::oracle::{dinkelbach_solve, GridSpec};
use millopt_bench::{case_evaluator, case_plan};
use std::hint::black_box;

fn fitness(c: &mut Criterion) {
    let (ev, genome) = case_evaluator();
    c.bench_function("fitness/case", |b| {
        b.iter(|| ev.fitness(black_box(&genome)).unwrap())
    });
}

fn es_generation(c: &mut Criterion) {
    let plan = case_plan();
    let config = EsConfig {
        seed: 1,
        ..Default::default()
    };
    c.bench_function("es/generation", |b| {
        b.iter_batched(
            || Engine::new(&plan, &config).unwrap(),
            |mut engine| {
                engine.step().unwrap();
                engine
            },
            criterion::BatchSize::SmallInput,
        )
    });
}

fn oracle(c: &mut Criterion) {
    let plan = case_plan();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for r in [100usize, 500] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| dinkelbach_solve(&plan, &GridSpec::with_resolution(r)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fitness, es_generation, oracle);
criterion_main!(benches);
