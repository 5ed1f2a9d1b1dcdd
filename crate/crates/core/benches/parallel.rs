use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minimax_lr::exec::Execution;
use minimax_lr::lr_lp::{hurwitz_on_grid, lemma1_equivalence_check};
use minimax_lr::suite::{stabilizable_suite, Shape};
use minimax_lr::water::{sweep_cost_vs_n, WaterParams};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn water_sweep(c: &mut Criterion) {
    let ns: Vec<usize> = (2..=42).step_by(4).collect();
    let template = WaterParams::default();
    let mut group = c.benchmark_group("water_sweep");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| sweep_cost_vs_n(&template, &ns, exec))
        });
    }
    group.finish();
}

fn sign_grid(c: &mut Criterion) {
    let suite = stabilizable_suite(8, 5, Shape { max_n: 8, max_m: 5, max_c: 0 }, Execution::Parallel);
    let mut group = c.benchmark_group("sign_grid");
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                suite
                    .iter()
                    .map(|(_, spec)| hurwitz_on_grid(spec, exec).unwrap().is_some())
                    .filter(|&x| x)
                    .count()
            })
        });
    }
    group.finish();
}

fn random_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("random_suite");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                let suite = stabilizable_suite(20, 1, Shape::default(), exec);
                suite
                    .iter()
                    .filter(|(_, spec)| lemma1_equivalence_check(spec, exec).unwrap().agree())
                    .count()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, water_sweep, sign_grid, random_suite);
criterion_main!(benches);
