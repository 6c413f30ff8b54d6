//! Shared fixtures for the benchmarks.

use quantumness_core::ensembles::{random_ensemble, random_povm, seeded_rng, Ensemble, Povm};
use quantumness_core::linalg::HermitianOperator;
use quantumness_core::SolverConfig;

pub const SEED: u64 = 7;

/// Random ensemble of `n` states in dimension `d`.
pub fn ensemble(d: usize, n: usize) -> Ensemble {
    random_ensemble(d, n, SEED, false).expect("valid sizes")
}

pub fn povm(d: usize, outcomes: usize) -> Povm {
    random_povm(&mut seeded_rng(SEED, 1), d, outcomes)
}

/// Density operator of a random ensemble; full rank when `n >= d`.
pub fn density(d: usize) -> HermitianOperator {
    ensemble(d, 2 * d).density()
}

pub fn solver_config(restarts: usize) -> SolverConfig {
    SolverConfig {
        restarts,
        ..SolverConfig::default()
    }
}
