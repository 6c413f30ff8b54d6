//! Seesaw maximization over POVMs.
//!
//! Each iteration fixes the current "target" operators `R_b` derived from
//! the objective (optimal responses, or maximum-likelihood guesses), under
//! which the objective is bounded below by the linear functional
//! `sum_b tr(E_b R_b)`, and moves the POVM with the completeness-preserving
//! fixed-point map
//!
//! ```text
//! E_b <- L^{-1/2} R_b E_b R_b L^{-1/2} + Q E_b Q,   L = sum_b R_b E_b R_b,
//! ```
//!
//! where `Q` projects onto the kernel of `L`. A step that lowers the true
//! objective is halved (convex combination with the current POVM) until it
//! does not.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::srm_povm;
use crate::ensembles::{random_isometry_elements, seeded_rng, Ensemble, Povm, PureState};
use crate::error::Result;
use crate::fidelity::{achievable_unchecked, best_guess, AchievabilityResult, NULL_OUTCOME};
use crate::linalg::{self, HermitianOperator};

use super::SolverConfig;

const MAX_HALVINGS: usize = 30;
/// Relative eigenvalue floor when inverting `L`.
const LAMBDA_SUPPORT_REL: f64 = 1e-12;
/// Completeness drift that triggers a renormalization.
const COMPLETENESS_DRIFT: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    SquareRoot,
    Warm,
    Random(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartTrace {
    pub start: StartKind,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Last accepted objective increase.
    pub residual: f64,
    /// Accepted objective values, starting with the initial one.
    #[serde(skip)]
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub best_start: StartKind,
    pub residual: f64,
    /// Outcomes with `tr(rho E_b) >= prune_tol` in the reported POVM.
    pub effective_outcomes: usize,
    pub restarts: Vec<RestartTrace>,
}

#[derive(Clone, Debug)]
pub struct AccessibleFidelity {
    pub result: AchievabilityResult,
    pub povm: Povm,
    pub diagnostics: SolveDiagnostics,
}

impl AccessibleFidelity {
    pub fn value(&self) -> f64 {
        self.result.value
    }
}

#[derive(Clone, Debug)]
pub struct SuccessOptimum {
    pub value: f64,
    pub povm: Povm,
    /// Guessed input per outcome.
    pub guesses: Vec<usize>,
    pub diagnostics: SolveDiagnostics,
}

trait Objective: Sync {
    type Aux: Send;
    fn evaluate(&self, elements: &[HermitianOperator]) -> (f64, Self::Aux);
    /// `R_b` for outcome `b` under the current auxiliary data.
    fn target(&self, aux: &Self::Aux, b: usize) -> HermitianOperator;
}

/// `sum_b lambda_1(M_b)`; auxiliary data are the top eigenvectors.
struct FidelityObjective<'a> {
    ens: &'a Ensemble,
}

impl Objective for FidelityObjective<'_> {
    type Aux = Vec<Vec<linalg::C64>>;

    fn evaluate(&self, elements: &[HermitianOperator]) -> (f64, Self::Aux) {
        let dim = self.ens.dim();
        let mut value = 0.0;
        let mut responses = Vec::with_capacity(elements.len());
        for e in elements {
            let mut m = HermitianOperator::zeros(dim);
            let mut pb = 0.0;
            for (p, s) in self.ens.items() {
                let w = p * e.expectation(s.amplitudes());
                pb += w;
                if w != 0.0 {
                    m.add_projector(w, s.amplitudes());
                }
            }
            if pb <= NULL_OUTCOME {
                responses.push(PureState::basis(dim, 0).amplitudes().to_vec());
                continue;
            }
            let (lambda, v) = linalg::top_eigenpair(&m).expect("finite operator");
            value += lambda;
            responses.push(v);
        }
        (value, responses)
    }

    fn target(&self, aux: &Self::Aux, b: usize) -> HermitianOperator {
        let phi = &aux[b];
        let mut r = HermitianOperator::zeros(self.ens.dim());
        for (p, s) in self.ens.items() {
            let w = p * linalg::inner(phi, s.amplitudes()).norm_sqr();
            if w != 0.0 {
                r.add_projector(w, s.amplitudes());
            }
        }
        r
    }
}

/// `sum_b max_i pi_i tr(Pi_i E_b)`; auxiliary data are the guesses.
struct SuccessObjective<'a> {
    ens: &'a Ensemble,
}

impl Objective for SuccessObjective<'_> {
    type Aux = Vec<usize>;

    fn evaluate(&self, elements: &[HermitianOperator]) -> (f64, Self::Aux) {
        let mut value = 0.0;
        let mut guesses = Vec::with_capacity(elements.len());
        for e in elements {
            let (i, v) = best_guess(self.ens, e);
            value += v;
            guesses.push(i);
        }
        (value, guesses)
    }

    fn target(&self, aux: &Self::Aux, b: usize) -> HermitianOperator {
        let i = aux[b];
        self.ens.states()[i].projector().scale(self.ens.priors()[i])
    }
}

struct RunOutcome {
    elements: Vec<HermitianOperator>,
    trace: RestartTrace,
}

/// The fixed-point measurement map; `None` if `L` vanishes.
fn measurement_update<O: Objective>(
    obj: &O,
    aux: &O::Aux,
    elements: &[HermitianOperator],
    dim: usize,
) -> Option<Vec<HermitianOperator>> {
    let sandwiched: Vec<HermitianOperator> = elements
        .iter()
        .enumerate()
        .map(|(b, e)| e.sandwiched_by(&obj.target(aux, b)))
        .collect();
    let lambda = sandwiched
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, x| acc.add(x));
    let eig = linalg::eigendecompose(&lambda).ok()?;
    let top = eig.values[0];
    if !(top > 0.0) {
        return None;
    }
    let floor = top * LAMBDA_SUPPORT_REL;
    let inv_sqrt = eig.reconstruct_with(|l| if l > floor { l.sqrt().recip() } else { 0.0 });
    let kernel = eig.reconstruct_with(|l| if l > floor { 0.0 } else { 1.0 });
    let has_kernel = kernel.trace() > 0.5;
    let updated = sandwiched
        .iter()
        .zip(elements)
        .map(|(x, e)| {
            let moved = x.sandwiched_by(&inv_sqrt);
            if has_kernel {
                moved.add(&e.sandwiched_by(&kernel))
            } else {
                moved
            }
        })
        .collect();
    Some(renormalize(updated, dim))
}

/// Restores `sum_b E_b = I` if rounding has drifted.
fn renormalize(elements: Vec<HermitianOperator>, dim: usize) -> Vec<HermitianOperator> {
    let total = elements
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, e| acc.add(e));
    if total.max_abs_diff(&HermitianOperator::identity(dim)) <= COMPLETENESS_DRIFT {
        return elements;
    }
    match linalg::inv_sqrt_psd(&total, linalg::SUPPORT_TOL) {
        Ok(b) => elements.iter().map(|e| e.sandwiched_by(&b)).collect(),
        Err(_) => elements,
    }
}

fn mix(current: &[HermitianOperator], target: &[HermitianOperator], step: f64) -> Vec<HermitianOperator> {
    current
        .iter()
        .zip(target)
        .map(|(a, b)| a.scale(1.0 - step).add(&b.scale(step)))
        .collect()
}

fn run<O: Objective>(
    obj: &O,
    dim: usize,
    start: StartKind,
    mut elements: Vec<HermitianOperator>,
    cfg: &SolverConfig,
) -> RunOutcome {
    let (mut value, mut aux) = obj.evaluate(&elements);
    let mut objective = vec![value];
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let Some(target) = measurement_update(obj, &aux, &elements, dim) else {
            converged = true;
            residual = 0.0;
            break;
        };
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = if step == 1.0 {
                target.clone()
            } else {
                mix(&elements, &target, step)
            };
            let (v, a) = obj.evaluate(&trial);
            if v >= value {
                accepted = Some((trial, v, a));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, v, a)) = accepted else {
            converged = true;
            residual = 0.0;
            break;
        };
        residual = v - value;
        elements = trial;
        value = v;
        aux = a;
        objective.push(v);
        if residual < cfg.convergence_tol {
            converged = true;
            break;
        }
    }

    RunOutcome {
        elements,
        trace: RestartTrace {
            start,
            final_value: value,
            iterations,
            converged,
            residual,
            objective,
        },
    }
}

fn starts(ens: &Ensemble, cfg: &SolverConfig, warm: Option<&Povm>) -> Vec<(StartKind, Vec<HermitianOperator>)> {
    let dim = ens.dim();
    let outcomes = cfg.outcomes_for(dim);
    let mut out = vec![(StartKind::SquareRoot, srm_povm(ens).into_elements())];
    if let Some(w) = warm.filter(|w| w.dim() == dim) {
        out.push((StartKind::Warm, w.elements().to_vec()));
    }
    for r in 1..=cfg.restarts {
        let mut rng = seeded_rng(cfg.seed, r as u64);
        out.push((StartKind::Random(r), random_isometry_elements(&mut rng, dim, outcomes)));
    }
    out
}

/// Runs every start (in parallel), keeps the best; ties go to the lowest
/// start index.
fn solve<O: Objective>(
    obj: &O,
    ens: &Ensemble,
    cfg: &SolverConfig,
    warm: Option<&Povm>,
) -> (RunOutcome, Vec<RestartTrace>) {
    let runs: Vec<RunOutcome> = starts(ens, cfg, warm)
        .into_par_iter()
        .map(|(kind, elements)| run(obj, ens.dim(), kind, elements, cfg))
        .collect();
    let traces: Vec<RestartTrace> = runs.iter().map(|r| r.trace.clone()).collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.trace.final_value > best.trace.final_value { r } else { best })
        .expect("at least one start");
    (best, traces)
}

/// Drops outcomes with `tr(rho E_b) < prune_tol`, redistributing their
/// mass over the rest; keeps the unpruned POVM if pruning costs value.
fn prune<O: Objective>(
    obj: &O,
    ens: &Ensemble,
    elements: Vec<HermitianOperator>,
    value: f64,
    prune_tol: f64,
) -> Vec<HermitianOperator> {
    let rho = ens.density();
    let (kept, dropped): (Vec<_>, Vec<_>) = elements
        .iter()
        .cloned()
        .partition(|e| rho.trace_product(e) >= prune_tol);
    if dropped.is_empty() || kept.is_empty() {
        return elements;
    }
    let dim = ens.dim();
    let total = kept.iter().fold(HermitianOperator::zeros(dim), |acc, e| acc.add(e));
    let Ok(eig) = linalg::eigendecompose(&total) else {
        return elements;
    };
    let floor = linalg::SUPPORT_TOL;
    let inv_sqrt = eig.reconstruct_with(|l| if l > floor { l.sqrt().recip() } else { 0.0 });
    let kernel = eig.reconstruct_with(|l| if l > floor { 0.0 } else { 1.0 });
    let mut pruned: Vec<HermitianOperator> = kept.iter().map(|e| e.sandwiched_by(&inv_sqrt)).collect();
    if kernel.trace() > 0.5 {
        pruned.push(kernel);
    }
    let (v, _) = obj.evaluate(&pruned);
    if v >= value - 1e-12 {
        pruned
    } else {
        elements
    }
}

fn effective_outcomes(ens: &Ensemble, elements: &[HermitianOperator], prune_tol: f64) -> usize {
    let rho = ens.density();
    elements.iter().filter(|e| rho.trace_product(e) >= prune_tol).count()
}

/// Accessible fidelity `max_E sum_b lambda_1(M_b)` by multi-start seesaw.
///
/// Starts are the square-root measurement, then `cfg.restarts` Haar-random
/// rank-one POVMs with `cfg.outcomes` (default `d^2`) outcomes.
/// Non-convergence is reported in the diagnostics, not as an error.
pub fn optimize_accessible_fidelity(ens: &Ensemble, cfg: &SolverConfig) -> Result<AccessibleFidelity> {
    optimize_accessible_fidelity_from(ens, cfg, None)
}

/// As [`optimize_accessible_fidelity`], with an extra warm start.
pub fn optimize_accessible_fidelity_from(
    ens: &Ensemble,
    cfg: &SolverConfig,
    warm: Option<&Povm>,
) -> Result<AccessibleFidelity> {
    cfg.validate()?;
    let obj = FidelityObjective { ens };
    let (best, traces) = solve(&obj, ens, cfg, warm);
    let elements = prune(&obj, ens, best.elements, best.trace.final_value, cfg.prune_tol);
    let result = achievable_unchecked(ens, &elements);
    let diagnostics = SolveDiagnostics {
        converged: best.trace.converged,
        iterations: best.trace.iterations,
        best_start: best.trace.start,
        residual: best.trace.residual,
        effective_outcomes: effective_outcomes(ens, &elements, cfg.prune_tol),
        restarts: traces,
    };
    Ok(AccessibleFidelity {
        result,
        povm: Povm::from_elements(elements)?,
        diagnostics,
    })
}

/// `max_E sum_b max_i pi_i tr(Pi_i E_b)` by the same seesaw, with
/// `R_b = pi_{i*(b)} Pi_{i*(b)}` for the current maximum-likelihood guess.
pub fn optimal_success_probability(ens: &Ensemble, cfg: &SolverConfig) -> Result<SuccessOptimum> {
    cfg.validate()?;
    let obj = SuccessObjective { ens };
    let (best, traces) = solve(&obj, ens, cfg, None);
    let elements = prune(&obj, ens, best.elements, best.trace.final_value, cfg.prune_tol);
    let (value, guesses) = obj.evaluate(&elements);
    let diagnostics = SolveDiagnostics {
        converged: best.trace.converged,
        iterations: best.trace.iterations,
        best_start: best.trace.start,
        residual: best.trace.residual,
        effective_outcomes: effective_outcomes(ens, &elements, cfg.prune_tol),
        restarts: traces,
    };
    Ok(SuccessOptimum {
        value: value.clamp(0.0, 1.0),
        povm: Povm::from_elements(elements)?,
        guesses,
        diagnostics,
    })
}
