use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use betaexp::bernoulli::measure_interval;
use betaexp::generators::{check_run, run_dense, run_paired};
use betaexp::numeric::real;
use betaexp::prefix::{count_levels, enumerate_prefixes_branching, enumerate_prefixes_direct};
use betaexp::BetaContext;

fn ctx(beta: f64) -> BetaContext {
    BetaContext::from_f64(beta).unwrap()
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_levels");
    for beta in [1.1, 1.3, 1.5, 1.9] {
        let cx = ctx(beta);
        let x = cx.upper() * 0.5;
        group.bench_with_input(BenchmarkId::new("k24", beta), &x, |b, &x| {
            b.iter(|| count_levels(&cx, black_box(x), 24).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let cx = ctx(1.5);
    let x = real(1.0);
    let mut group = c.benchmark_group("enumerate_k14");
    group.bench_function("branching", |b| {
        b.iter(|| enumerate_prefixes_branching(&cx, black_box(x), 14).unwrap())
    });
    group.bench_function("direct", |b| {
        b.iter(|| enumerate_prefixes_direct(&cx, black_box(x), 14).unwrap())
    });
    group.finish();
}

fn generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("generators");
    let dense = ctx(1.05);
    group.bench_function("dense_m1_3_blocks", |b| {
        b.iter(|| run_dense(&dense, 1, black_box(real(2.0)), 3).unwrap())
    });
    let paired = ctx(1.32);
    group.bench_function("paired_m1_6_blocks", |b| {
        b.iter(|| run_paired(&paired, 1, black_box(real(1.1)), 6).unwrap())
    });
    let run = run_dense(&dense, 1, real(2.0), 3).unwrap();
    group.bench_function("check_dense_m1", |b| {
        b.iter(|| check_run(&dense, black_box(&run)).unwrap())
    });
    group.finish();
}

fn measure(c: &mut Criterion) {
    let cx = ctx(1.5);
    c.bench_function("measure_interval_depth24", |b| {
        b.iter(|| measure_interval(&cx, black_box(real(0.4)), real(0.6), 24).unwrap())
    });
}

criterion_group!(benches, counting, enumeration, generators, measure);
criterion_main!(benches);
