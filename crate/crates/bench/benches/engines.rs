use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphstate_core::families::{cycle_tsrr, exotic, fc_template, one_loop, pi2_template};
use graphstate_core::flow::max_flow_value;
use graphstate_core::moments::{asymptotic_moment, exact_moment};
use graphstate_core::montecarlo::{estimate, assemble_state, partial_trace};
use graphstate_core::{EstimateConfig, SamplingMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_flow(c: &mut Criterion) {
    let specs = [("fc5", fc_template(5)), ("exotic", exotic()), ("tsrr", cycle_tsrr())];
    let mut group = c.benchmark_group("max_flow");
    for (name, m) in &specs {
        group.bench_function(*name, |b| b.iter(|| max_flow_value(black_box(m))));
    }
    group.finish();
}

fn bench_asymptotic(c: &mut Criterion) {
    let mut group = c.benchmark_group("asymptotic_moment");
    group.sample_size(20);
    for p in [3, 4, 5] {
        let m = exotic();
        group.bench_with_input(BenchmarkId::new("exotic", p), &p, |b, &p| {
            b.iter(|| asymptotic_moment(black_box(&m), p).unwrap())
        });
    }
    let m = fc_template(3);
    group.bench_function("fc3_p6", |b| b.iter(|| asymptotic_moment(black_box(&m), 6).unwrap()));
    group.finish();
}

fn bench_exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_moment");
    group.sample_size(20);
    let m = pi2_template();
    for p in [2, 3, 4] {
        group.bench_with_input(BenchmarkId::new("pi2_n4", p), &p, |b, &p| {
            b.iter(|| exact_moment(black_box(&m), p, 4).unwrap())
        });
    }
    let m = cycle_tsrr();
    group.bench_function("tsrr_p3_n5", |b| b.iter(|| exact_moment(black_box(&m), 3, 5).unwrap()));
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let m = one_loop();
    for n in [16u64, 64] {
        group.bench_with_input(BenchmarkId::new("one_loop_trial", n), &n, |b, &n| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter(|| {
                let state = assemble_state(m.graph(), n, SamplingMode::Haar, &mut rng).unwrap();
                partial_trace(&state, m.traced()).unwrap().eigenvalues()
            })
        });
    }
    let m = cycle_tsrr();
    let config = EstimateConfig {
        trials: 8,
        entropy: false,
        ..EstimateConfig::default()
    };
    group.bench_function("tsrr_n4_8_trials", |b| b.iter(|| estimate(black_box(&m), 4, &config).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_flow, bench_asymptotic, bench_exact, bench_monte_carlo);
criterion_main!(benches);
