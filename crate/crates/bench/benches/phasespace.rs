use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qes_bench::{default_grid, small_grid, state};
use qes_core::infotheory::{crj_rows, entropy_reports};
use qes_core::phasespace::{husimi_grid, wigner_grid};
use qes_core::{MarginalSet, PhaseSpaceSet};

fn bench_grids(c: &mut Criterion) {
    let psi = state(0, 4.0);
    let spec = small_grid();
    let mut group = c.benchmark_group("grid_81x81");
    group.bench_function("wigner", |b| b.iter(|| wigner_grid(black_box(&psi), &spec).unwrap()));
    group.bench_function("husimi", |b| b.iter(|| husimi_grid(black_box(&psi), &spec).unwrap()));
    group.finish();
}

fn bench_default_pipeline(c: &mut Criterion) {
    let psi = state(1, 4.0);
    let spec = default_grid();
    let mut group = c.benchmark_group("default_grid");
    group.sample_size(10);
    group.bench_function("phase_space_set", |b| {
        b.iter(|| PhaseSpaceSet::compute(black_box(&psi), &spec).unwrap())
    });
    let set = PhaseSpaceSet::compute(&psi, &spec).unwrap();
    group.bench_function("entropies", |b| b.iter(|| entropy_reports(black_box(&set), 4.0, 1).unwrap()));
    group.bench_function("crj", |b| {
        b.iter(|| {
            let m = MarginalSet::with_exact_wigner(black_box(&set), &psi).unwrap();
            crj_rows(&m, 4.0, 1).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_grids, bench_default_pipeline);
criterion_main!(benches);
