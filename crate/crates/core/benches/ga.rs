use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use swapsched::ga::{compare_with, generate_individual, run_with};
use swapsched::station::{fitness, xi_max};
use swapsched::synthetic::synthetic_region;
use swapsched::{Exec, GaConfig, StationConfig, Strategy};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn evaluation(c: &mut Criterion) {
    let station = StationConfig::default();
    let profile = synthetic_region(1001, &station);
    let xi = xi_max(&profile, &station);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut group = c.benchmark_group("evaluate_population");
    for size in [100usize, 1000] {
        let pop: Vec<_> = (0..size)
            .map(|_| generate_individual(&profile, &station, Strategy::Lru, &mut rng))
            .collect();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &pop, |b, pop| {
                b.iter(|| exec.map(pop, |ind| fitness(ind, &profile, &station, xi)))
            });
        }
    }
    group.finish();
}

fn ga_run(c: &mut Criterion) {
    let station = StationConfig::default();
    let profile = synthetic_region(1001, &station);
    let ga = GaConfig {
        max_iterations: 100,
        ..Default::default()
    };
    let mut group = c.benchmark_group("ga_run");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_with(black_box(&profile), &station, &ga, exec))
        });
    }
    group.finish();
}

fn comparison(c: &mut Criterion) {
    let station = StationConfig::default();
    let profile = synthetic_region(1002, &station);
    let ga = GaConfig {
        max_iterations: 50,
        ..Default::default()
    };
    let seeds = [0, 1, 2, 3];
    let mut group = c.benchmark_group("compare_strategies");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                compare_with(
                    &profile,
                    &station,
                    &ga,
                    &seeds,
                    [Strategy::Lru, Strategy::Uniform],
                    exec,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, evaluation, ga_run, comparison);
criterion_main!(benches);
