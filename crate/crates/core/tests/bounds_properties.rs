use quantumness_core::bounds::{
    bounds_report, clone_fidelity, clone_try_fidelity, helstrom_success, pgm_fidelity, pgm_fidelity_direct,
    srm_povm,
};
use quantumness_core::ensembles::{
    bloch_state, haar_unitary, make_two_state_ensemble, random_ensemble, seeded_rng, validate_povm, Povm,
};
use quantumness_core::fidelity::{achievable_fidelity, success_probability};

#[test]
fn cloning_closed_form_dominates_random_unitaries() {
    let mut rng = seeded_rng(2024, 0);
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        let bound = clone_fidelity(x).unwrap();
        for _ in 0..1000 {
            let u = haar_unitary(&mut rng, 4);
            let f = clone_try_fidelity(x, &u).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f <= bound + 1e-9, "x={x}: {f} > {bound}");
        }
    }
}

#[test]
fn square_root_routes_agree() {
    for case in 0..200u64 {
        let d = 1 + (case as usize % 4);
        let n = 1 + (case as usize / 4) % 6;
        let ens = random_ensemble(d, n, 7000 + case, case % 3 == 0).unwrap();
        let srm = srm_povm(&ens);
        assert!(validate_povm(&srm).is_empty());
        let inserted = achievable_fidelity(&ens, &srm).unwrap().value;
        let direct = pgm_fidelity_direct(&ens);
        assert!((inserted - direct).abs() <= 1e-9, "case {case}: {inserted} vs {direct}");
        assert!((pgm_fidelity(&ens) - inserted).abs() <= 1e-12);
        let report = bounds_report(&ens, None, None);
        assert!(report.pgm_routes_agree && report.hierarchy.ok());
    }
}

#[test]
fn helstrom_matches_best_projective_measurement() {
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        let ens = make_two_state_ensemble(x, 0.5).unwrap();
        let steps = 20_000;
        let best = (0..=steps)
            .map(|j| {
                let t = std::f64::consts::PI * j as f64 / steps as f64;
                let up = bloch_state([t.sin(), 0.0, t.cos()]).unwrap();
                let down = bloch_state([-t.sin(), 0.0, -t.cos()]).unwrap();
                let povm = Povm::from_basis(&[up, down]).unwrap();
                success_probability(&ens, &povm).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let h = helstrom_success(x).unwrap();
        assert!((best - h).abs() <= 1e-6, "x={x}: {best} vs {h}");
    }
}

#[test]
fn bounds_are_invariant_under_unitaries() {
    for case in 0..50u64 {
        let ens = random_ensemble(3, 4, case, false).unwrap();
        let u = haar_unitary(&mut seeded_rng(case, 9), 3);
        let rotated = quantumness_core::Ensemble::new(
            ens.priors().to_vec(),
            ens.states().iter().map(|s| s.transformed(&u)).collect(),
        )
        .unwrap();
        assert!((pgm_fidelity(&ens) - pgm_fidelity(&rotated)).abs() <= 1e-10);
    }
}
