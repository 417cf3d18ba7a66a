//! Sweep throughput: the rayon fan-out against a single worker thread, plus
//! the cost of one integration as a baseline. Build with
//! `--no-default-features` to measure the plain sequential code path that
//! exists when the `parallel` feature is off.

use criterion::{criterion_group, criterion_main, Criterion};
use neseek::batch::{run_sweep, SweepSpec};
use neseek::phi::PhiRegistry;
use neseek::scenario::load;
use neseek::sim::integrate;

fn short_horizon() -> Vec<(String, String)> {
    vec![("integration.T".to_string(), "2.0".to_string())]
}

fn single_run(c: &mut Criterion) {
    let registry = PhiRegistry::new();
    let built = load("builtin:estimator_only", &short_horizon(), &registry)
        .expect("builtin loads");
    c.bench_function("integrate_estimator_2s", |b| {
        b.iter(|| {
            integrate(&built.closed_loop, &built.initial_state, &built.params)
                .expect("integration runs")
        })
    });
}

fn sweep(c: &mut Criterion) {
    let registry = PhiRegistry::new();
    let overrides = short_horizon();
    let spec = SweepSpec {
        source: "builtin:estimator_only",
        overrides: &overrides,
        parameter: "estimator.delta",
    };
    let values: Vec<f64> = (1..=6).map(|k| 4.0 + f64::from(k)).collect();

    let mut group = c.benchmark_group("sweep_6_values");
    group.sample_size(10);

    #[cfg(feature = "parallel")]
    {
        group.bench_function("default_pool", |b| {
            b.iter(|| run_sweep(&spec, &values, &registry).expect("sweep runs"))
        });
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("pool builds");
        group.bench_function("one_thread", |b| {
            b.iter(|| single.install(|| run_sweep(&spec, &values, &registry).expect("sweep runs")))
        });
    }

    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| run_sweep(&spec, &values, &registry).expect("sweep runs"))
    });

    group.finish();
}

criterion_group!(benches, single_run, sweep);
criterion_main!(benches);
