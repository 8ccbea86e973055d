use std::hint::black_box;

use blda_bench::{symmetric, synthetic};
use blda_core::eval::classify_all;
use blda_core::{fit, sym_eig, verify_bound, Method};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eig");
    for n in [8, 32, 64] {
        let s = symmetric(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| b.iter(|| sym_eig(black_box(s), 1e-13)));
    }
    group.finish();
}

fn fitting(c: &mut Criterion) {
    let data = synthetic(32, 32, 15, 7, 2);
    let mut group = c.benchmark_group("fit_32x32");
    for method in [Method::TwoDBLDA, Method::TwoDLDA, Method::TwoDPCA] {
        group.bench_function(method.name(), |b| b.iter(|| fit(method, black_box(&data), 8, None)));
    }
    group.finish();
}

fn recognition(c: &mut Criterion) {
    let train = synthetic(32, 32, 15, 7, 3);
    let test = synthetic(32, 32, 15, 4, 3);
    let p = fit(Method::TwoDBLDA, &train, 8, None).unwrap();
    c.bench_function("classify_60_queries", |b| b.iter(|| classify_all(&p, &train, black_box(test.samples()))));
}

fn bound(c: &mut Criterion) {
    let data = synthetic(16, 16, 5, 20, 4);
    c.bench_function("verify_bound_100", |b| b.iter(|| verify_bound(black_box(&data), 100, 0)));
}

criterion_group!(benches, eigensolver, fitting, recognition, bound);
criterion_main!(benches);
