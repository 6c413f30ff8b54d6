use proptest::prelude::*;
use quantumness_core::bounds::{pgm_fidelity, trivial_bound};
use quantumness_core::ensembles::{
    haar_unitary, make_two_state_ensemble, random_ensemble, seeded_rng, validate_povm, PureState,
};
use quantumness_core::solvers::{
    brute_force_qubit_fidelity_with, explore_space_quantumness, optimal_success_probability,
    optimize_accessible_fidelity, quantumness_with, ExploreOptions, OracleConfig, QuantumnessOptions,
    SolverConfig,
};

fn restarts(n: usize) -> SolverConfig {
    SolverConfig {
        restarts: n,
        ..SolverConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn accepted_objectives_never_decrease(d in 2usize..5, n in 1usize..6, seed in any::<u64>()) {
        let ens = random_ensemble(d, n, seed, false).unwrap();
        let cfg = SolverConfig { seed, ..restarts(4) };
        let acc = optimize_accessible_fidelity(&ens, &cfg).unwrap();
        let ps = optimal_success_probability(&ens, &cfg).unwrap();
        for t in acc.diagnostics.restarts.iter().chain(&ps.diagnostics.restarts) {
            prop_assert!(t.objective.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }
}

#[test]
fn certificate_sandwich() {
    for case in 0..40u64 {
        let d = 2 + (case as usize % 2);
        let ens = random_ensemble(d, 1 + (case as usize % 5), 300 + case, case % 2 == 0).unwrap();
        let cfg = restarts(8);
        let acc = optimize_accessible_fidelity(&ens, &cfg).unwrap();
        let ps = optimal_success_probability(&ens, &cfg).unwrap();
        assert!(validate_povm(&acc.povm).is_empty());
        assert!(validate_povm(&ps.povm).is_empty());
        let lower = trivial_bound(&ens).max(pgm_fidelity(&ens)).max(ps.value);
        assert!(acc.value() >= lower - 1e-7, "case {case}");
        assert!(acc.value() <= 1.0);
    }
}

#[test]
fn identical_configs_give_identical_results() {
    let ens = random_ensemble(3, 4, 17, false).unwrap();
    let cfg = SolverConfig { seed: 5, ..restarts(6) };
    let a = optimize_accessible_fidelity(&ens, &cfg).unwrap();
    let b = optimize_accessible_fidelity(&ens, &cfg).unwrap();
    assert_eq!(a.value().to_bits(), b.value().to_bits());
    assert_eq!(a.povm, b.povm);
    assert_eq!(a.result.responses, b.result.responses);
}

#[test]
fn restart_robustness_across_seeds() {
    for case in 0..50u64 {
        let ens = random_ensemble(2, 1 + (case as usize % 4), 900 + case, false).unwrap();
        let values: Vec<f64> = (0..5)
            .map(|seed| {
                let cfg = SolverConfig { seed, ..SolverConfig::default() };
                optimize_accessible_fidelity(&ens, &cfg).unwrap().value()
            })
            .collect();
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi - lo < 1e-6, "case {case}: {values:?}");
    }
}

#[test]
fn seesaw_agrees_with_qubit_oracle() {
    let oracle = OracleConfig {
        resolution: 2e-3,
        random_povms: 20_000,
        ..OracleConfig::default()
    };
    for case in 0..12u64 {
        let ens = random_ensemble(2, 2 + (case as usize % 3), 40 + case, false).unwrap();
        let acc = optimize_accessible_fidelity(&ens, &SolverConfig::default()).unwrap().value();
        let brute = brute_force_qubit_fidelity_with(&ens, &oracle).unwrap();
        assert!((acc - brute).abs() < 1e-4, "case {case}: {acc} vs {brute}");
    }
}

#[test]
fn two_state_fidelity_is_convex_in_the_prior() {
    for x in [0.3, 0.6, 0.9] {
        let values: Vec<f64> = (0..=100)
            .map(|k| {
                let ens = make_two_state_ensemble(x, k as f64 / 100.0).unwrap();
                optimize_accessible_fidelity(&ens, &restarts(8)).unwrap().value()
            })
            .collect();
        for w in values.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-5, "x={x}");
        }
    }
}

fn quick_outer() -> QuantumnessOptions {
    QuantumnessOptions {
        outer_iterations: 60,
        polish_evals: 60,
        ..QuantumnessOptions::default()
    }
}

#[test]
fn quantumness_is_unitarily_invariant() {
    for (case, (d, n)) in [(2usize, 3usize), (2, 4), (3, 3)].into_iter().enumerate() {
        let states = random_ensemble(d, n, 60 + case as u64, true).unwrap().states().to_vec();
        let u = haar_unitary(&mut seeded_rng(case as u64, 3), d);
        let rotated: Vec<PureState> = states.iter().map(|s| s.transformed(&u)).collect();
        let cfg = restarts(8);
        let q = quantumness_with(&states, &cfg, &quick_outer()).unwrap();
        let r = quantumness_with(&rotated, &cfg, &quick_outer()).unwrap();
        assert!((q.value - r.value).abs() < 1e-5, "d={d} n={n}: {} vs {}", q.value, r.value);
        assert!(q.value >= 1.0 / d as f64 - 1e-9 && q.value <= 1.0 + 1e-12);
        assert!((q.worst_priors.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn explored_pairs_reach_the_two_state_curve() {
    let cfg = restarts(2);
    let outer = QuantumnessOptions {
        outer_iterations: 10,
        polish_evals: 10,
        ..QuantumnessOptions::default()
    };
    let curve = (0..=100)
        .map(|k| {
            let ens = make_two_state_ensemble(k as f64 / 100.0, 0.5).unwrap();
            quantumness_with(ens.states(), &cfg, &outer).unwrap().value
        })
        .fold(f64::INFINITY, f64::min);
    let opts = ExploreOptions {
        draws: 1,
        hill_sweeps: 20,
        quantumness: outer,
        ..ExploreOptions::default()
    };
    let found = explore_space_quantumness(2, &[2], &cfg, &opts).unwrap();
    assert!(found.best_value <= curve + 1e-4, "{} vs {curve}", found.best_value);

    let grown = explore_space_quantumness(2, &[2, 3, 4], &cfg, &opts).unwrap();
    assert!(grown.per_size.windows(2).all(|w| w[1].running_best <= w[0].running_best));
}
