use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fmc_benches::{cartpole, grid5, rocket};
use fmc_core::theory::{enumerate_cone, TabularPolicy};
use fmc_core::{plan, relativize, vanilla_mc_decide, ActionSampler, Environment, FmcParams};

fn decisions(c: &mut Criterion) {
    let mut g = c.benchmark_group("decision");
    let (env, params) = cartpole();
    let x0 = env.initial_state();
    for parallel in [false, true] {
        let p = FmcParams { parallel, ..params.clone() };
        g.bench_with_input(BenchmarkId::new("cartpole_fmc", parallel), &p, |b, p| {
            b.iter(|| plan(&env, black_box(&x0), p, ActionSampler::uniform()).unwrap())
        });
    }
    g.bench_function("cartpole_vanilla_mc", |b| {
        b.iter(|| vanilla_mc_decide(&env, black_box(&x0), &params).unwrap())
    });
    let (env, params) = rocket();
    let x0 = env.initial_state();
    let p = FmcParams { parallel: true, ..params };
    g.bench_function("rocket_fmc_assist_default", |b| {
        b.iter(|| plan(&env, black_box(&x0), &p, ActionSampler::uniform()).unwrap())
    });
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let env = grid5();
    let x0 = env.initial_state();
    let policy = TabularPolicy::uniform(4);
    c.bench_function("grid5_cone_20_ticks", |b| {
        b.iter(|| enumerate_cone(&env, black_box(&x0), 20, 1.0, &policy).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    let values: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
    c.bench_function("relativize_1000", |b| b.iter(|| relativize(black_box(&values)).unwrap()));
}

criterion_group!(benches, decisions, oracle, kernels);
criterion_main!(benches);
