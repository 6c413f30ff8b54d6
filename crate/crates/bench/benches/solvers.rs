use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quantumness_bench::{ensemble, solver_config};
use quantumness_core::ensembles::make_two_state_ensemble;
use quantumness_core::solvers::{
    brute_force_qubit_fidelity_with, optimal_success_probability, optimize_accessible_fidelity,
    optimize_clone_unitary, quantumness_with, OracleConfig, QuantumnessOptions,
};

fn seesaw(c: &mut Criterion) {
    let mut group = c.benchmark_group("seesaw");
    group.sample_size(10);
    let cfg = solver_config(8);
    for (d, n) in [(2, 3), (3, 5), (4, 8)] {
        let ens = ensemble(d, n);
        group.bench_with_input(BenchmarkId::new("accessible", format!("d{d}n{n}")), &ens, |b, e| {
            b.iter(|| optimize_accessible_fidelity(black_box(e), &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("success", format!("d{d}n{n}")), &ens, |b, e| {
            b.iter(|| optimal_success_probability(black_box(e), &cfg).unwrap())
        });
    }
    group.finish();
}

fn outer(c: &mut Criterion) {
    let mut group = c.benchmark_group("outer");
    group.sample_size(10);
    let pair = make_two_state_ensemble(0.6, 0.5).unwrap();
    let oracle = OracleConfig {
        resolution: 1e-2,
        random_povms: 2_000,
        ..OracleConfig::default()
    };
    group.bench_function("qubit_oracle", |b| {
        b.iter(|| brute_force_qubit_fidelity_with(black_box(&pair), &oracle).unwrap())
    });
    let opts = QuantumnessOptions {
        outer_iterations: 40,
        polish_evals: 20,
        ..QuantumnessOptions::default()
    };
    let cfg = solver_config(4);
    let triple = ensemble(2, 3);
    group.bench_function("quantumness_qubit_triple", |b| {
        b.iter(|| quantumness_with(black_box(triple.states()), &cfg, &opts).unwrap())
    });
    group.bench_function("clone_unitary", |b| {
        b.iter(|| optimize_clone_unitary(black_box(0.6), &solver_config(2)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, seesaw, outer);
criterion_main!(benches);
