//! Numerical optimizers over measurements, priors and cloning unitaries.
//!
//! Every solver is deterministic for a fixed [`SolverConfig`]: restarts
//! draw from independent generator streams `(seed, restart_index)` and run
//! in parallel, and the reduction keeps the best value with ties going to
//! the lowest restart index.

mod clone;
mod explore;
mod nelder_mead;
mod oracle;
mod quantumness;
mod seesaw;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use clone::{optimize_clone_unitary, unitary_from_params, CloneOptimum, CLONE_PARAMS};
pub use explore::{explore_space_quantumness, ExploreOptions, ExploreReport, SizeRecord, HEURISTIC_LABEL};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use oracle::{brute_force_qubit_fidelity, brute_force_qubit_fidelity_with, OracleConfig};
pub use quantumness::{
    quantumness, quantumness_with, QuantumnessOptions, QuantumnessResult, CONVEXITY_RATIONALE,
};
pub use seesaw::{
    optimal_success_probability, optimize_accessible_fidelity, optimize_accessible_fidelity_from,
    AccessibleFidelity, RestartTrace, SolveDiagnostics, StartKind, SuccessOptimum,
};
pub use simplex::project_to_simplex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Number of POVM outcomes for random starts; `None` means `d^2`.
    pub outcomes: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub prune_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            outcomes: None,
            restarts: 32,
            max_iterations: 500,
            convergence_tol: 1e-10,
            prune_tol: 1e-12,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outcomes == Some(0) {
            return Err(Error::InvalidInput("outcomes must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be >= 1".into()));
        }
        if !(self.convergence_tol > 0.0) || !(self.prune_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be > 0".into()));
        }
        Ok(())
    }

    pub fn outcomes_for(&self, dim: usize) -> usize {
        self.outcomes.unwrap_or(dim * dim)
    }
}
