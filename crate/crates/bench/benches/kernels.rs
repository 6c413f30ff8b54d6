use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quantumness_bench::{density, ensemble, povm};
use quantumness_core::bounds::{pgm_fidelity, pgm_fidelity_direct};
use quantumness_core::fidelity::achievable_fidelity;
use quantumness_core::linalg::{eigendecompose, inv_sqrt_psd, top_eigenpair, SUPPORT_TOL};

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    for d in [2, 4, 8, 16] {
        let rho = density(d);
        group.bench_with_input(BenchmarkId::new("eigendecompose", d), &rho, |b, h| {
            b.iter(|| eigendecompose(black_box(h)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("top_eigenpair", d), &rho, |b, h| {
            b.iter(|| top_eigenpair(black_box(h)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("inv_sqrt_psd", d), &rho, |b, h| {
            b.iter(|| inv_sqrt_psd(black_box(h), SUPPORT_TOL).unwrap())
        });
    }
    group.finish();
}

fn fidelity(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity");
    for d in [2, 4, 8] {
        let ens = ensemble(d, 2 * d);
        let m = povm(d, d * d);
        group.bench_with_input(BenchmarkId::new("achievable", d), &d, |b, _| {
            b.iter(|| achievable_fidelity(black_box(&ens), black_box(&m)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pgm_inserted", d), &d, |b, _| {
            b.iter(|| pgm_fidelity(black_box(&ens)))
        });
        group.bench_with_input(BenchmarkId::new("pgm_direct", d), &d, |b, _| {
            b.iter(|| pgm_fidelity_direct(black_box(&ens)))
        });
    }
    group.finish();
}

criterion_group!(benches, eigen, fidelity);
criterion_main!(benches);
