use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cyclewalk::evolution::{DirectWalk, FourierWalk};
use cyclewalk::fourier::{superop_closed_form, superop_definitional};
use cyclewalk::spectral;
use cyclewalk_bench::config;
use std::hint::black_box;

fn superop_construction(c: &mut Criterion) {
    let cfg = config(16, 0.3);
    let mut group = c.benchmark_group("superop");
    group.bench_function("definitional", |b| {
        b.iter(|| superop_definitional(black_box(3), black_box(11), &cfg).unwrap())
    });
    group.bench_function("closed_form", |b| {
        b.iter(|| superop_closed_form(black_box(3), black_box(11), &cfg).unwrap())
    });
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let l = superop_definitional(2, 5, &config(16, 0.3)).unwrap();
    c.bench_function("eigenvalues", |b| {
        b.iter(|| spectral::eigenvalues(black_box(&l)).unwrap())
    });
}

fn fourier_distribution(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_distribution");
    for n in [8usize, 16, 32] {
        let mut walk = FourierWalk::new(&config(n, 0.3));
        for _ in 0..50 {
            walk.step();
        }
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| walk.distribution().unwrap())
        });
    }
    group.finish();
}

fn direct_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("direct_step");
    group.sample_size(20);
    for n in [8usize, 16, 32] {
        let mut walk = DirectWalk::new(&config(n, 0.3)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| walk.step())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    superop_construction,
    eigen,
    fourier_distribution,
    direct_step
);
criterion_main!(benches);
