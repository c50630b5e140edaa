use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use actspace_bench::{fixture_params, fixture_points};
use actspace_core::{
    grid_for_points, persistence_pairs, rank_pipeline, run_single_rep, three_anchor_model,
    Bandwidth, BenchConfig, Connectivity, KernelDensity,
};

fn bench_sampling(c: &mut Criterion) {
    let model = three_anchor_model();
    let mut group = c.benchmark_group("sample");
    for n in [1000usize, 8000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(model.sample(n, 1).unwrap()))
        });
    }
    group.finish();
}

fn bench_density_field(c: &mut Criterion) {
    let params = fixture_params();
    let mut group = c.benchmark_group("density_field");
    group.sample_size(20);
    for n in [1000usize, 8000] {
        let points = fixture_points(n, 1);
        let grid = grid_for_points(&points, params.bandwidth, params.cell_size).unwrap();
        let kd = KernelDensity::new(&points, Bandwidth::new(params.bandwidth).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(kd.field(&grid).unwrap()))
        });
    }
    group.finish();
}

fn bench_rank_pipeline(c: &mut Criterion) {
    let points = fixture_points(8000, 1);
    let params = fixture_params();
    let mut group = c.benchmark_group("rank_pipeline");
    group.sample_size(20);
    group.bench_function("8000_points", |b| {
        b.iter(|| black_box(rank_pipeline(&points, &params).unwrap()))
    });
    group.finish();
}

fn bench_persistence(c: &mut Criterion) {
    let points = fixture_points(8000, 1);
    let (_, _, rank) = rank_pipeline(&points, &fixture_params()).unwrap();
    c.bench_function("persistence_pairs", |b| {
        b.iter(|| black_box(persistence_pairs(&rank, Connectivity::Eight)))
    });
}

fn bench_error_rep(c: &mut Criterion) {
    let model = three_anchor_model();
    let cfg = BenchConfig {
        n: 8000,
        reps: 1,
        seed: 1,
        params: fixture_params(),
        gammas: BenchConfig::standard_gammas(),
    };
    let mut group = c.benchmark_group("error_benchmark");
    group.sample_size(10);
    group.bench_function("single_rep", |b| {
        b.iter(|| black_box(run_single_rep(&model, &cfg, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_sampling,
    bench_density_field,
    bench_rank_pipeline,
    bench_persistence,
    bench_error_rep
);
criterion_main!(benches);
