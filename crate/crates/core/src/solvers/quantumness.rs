//! Quantumness of a state set: accessible fidelity minimized over priors.

use serde::{Deserialize, Serialize};

use crate::ensembles::{Ensemble, Povm, PureState};
use crate::error::{Error, Result};
use crate::fidelity::{state_fidelities, AchievabilityResult};

use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::seesaw::{optimize_accessible_fidelity_from, AccessibleFidelity};
use super::simplex::project_to_simplex;
use super::SolverConfig;

/// Recorded in quantumness reports.
pub const CONVEXITY_RATIONALE: &str = "For a fixed measurement each conditional operator M_b is linear in \
the priors and its largest eigenvalue is convex, so the achievable fidelity is convex in the priors; \
the accessible fidelity is a maximum of convex functions and hence convex. The outer minimization \
over the simplex therefore has no spurious local minima up to inner-solver error.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantumnessOptions {
    pub outer_iterations: usize,
    /// `c` in the step size `c / sqrt(t)`.
    pub step_scale: f64,
    /// Objective evaluations allowed in the final simplex polish.
    pub polish_evals: usize,
}

impl Default for QuantumnessOptions {
    fn default() -> Self {
        Self {
            outer_iterations: 200,
            step_scale: 0.1,
            polish_evals: 120,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuantumnessResult {
    pub value: f64,
    pub worst_priors: Vec<f64>,
    /// Optimal measurement data at the worst priors.
    pub inner: AchievabilityResult,
    pub povm: Povm,
    pub outer_iterations: usize,
    pub polish_evals: usize,
    /// Inner solve at the worst priors converged.
    pub converged: bool,
}

struct Outer<'a> {
    base: Ensemble,
    cfg: &'a SolverConfig,
}

impl Outer<'_> {
    fn solve(&self, priors: &[f64], warm: Option<&Povm>) -> Result<AccessibleFidelity> {
        let ens = self.base.reweighted(priors.to_vec())?;
        optimize_accessible_fidelity_from(&ens, self.cfg, warm)
    }
}

pub fn quantumness(states: &[PureState], cfg: &SolverConfig) -> Result<QuantumnessResult> {
    quantumness_with(states, cfg, &QuantumnessOptions::default())
}

/// Projected subgradient descent over the prior simplex (boundary
/// included), steps `c / sqrt(t)`, followed by a Nelder-Mead polish on
/// the simplex. The subgradient at `pi` is the vector of per-state
/// fidelities of the inner optimal protocol. Each inner solve is
/// warm-started from the previous measurement.
pub fn quantumness_with(
    states: &[PureState],
    cfg: &SolverConfig,
    opts: &QuantumnessOptions,
) -> Result<QuantumnessResult> {
    cfg.validate()?;
    if states.is_empty() {
        return Err(Error::InvalidInput("at least one state is required".into()));
    }
    if !(opts.step_scale > 0.0) {
        return Err(Error::InvalidInput("step_scale must be > 0".into()));
    }
    let outer = Outer {
        base: Ensemble::uniform(states.to_vec())?,
        cfg,
    };
    let n = states.len();

    let mut priors = vec![1.0 / n as f64; n];
    let mut current = outer.solve(&priors, None)?;
    let mut best = (priors.clone(), current.clone());
    let iterations = if n == 1 { 0 } else { opts.outer_iterations };

    for t in 1..=iterations {
        let ens = outer.base.reweighted(priors.clone())?;
        let g = state_fidelities(&ens, &current.povm, &current.result.responses);
        let step = opts.step_scale / (t as f64).sqrt();
        let y: Vec<f64> = priors.iter().zip(&g).map(|(p, gi)| p - step * gi).collect();
        priors = project_to_simplex(&y);
        current = outer.solve(&priors, Some(&current.povm))?;
        if current.value() < best.1.value() {
            best = (priors.clone(), current.clone());
        }
    }

    let mut polish_evals = 0;
    if n > 1 && opts.polish_evals > 0 {
        let warm = best.1.povm.clone();
        let nm = nelder_mead(
            |y| {
                let p = project_to_simplex(y);
                outer.solve(&p, Some(&warm)).map_or(f64::INFINITY, |r| r.value())
            },
            &best.0,
            &NelderMeadOptions {
                max_evals: opts.polish_evals,
                initial_step: 0.02,
                f_tol: cfg.convergence_tol,
            },
        );
        polish_evals = nm.evals;
        if nm.value < best.1.value() {
            let p = project_to_simplex(&nm.x);
            let r = outer.solve(&p, Some(&warm))?;
            if r.value() < best.1.value() {
                best = (p, r);
            }
        }
    }

    let (worst_priors, solved) = best;
    Ok(QuantumnessResult {
        value: solved.value(),
        worst_priors,
        converged: solved.diagnostics.converged,
        inner: solved.result,
        povm: solved.povm,
        outer_iterations: iterations,
        polish_evals,
    })
}
