//! Fidelity quantities for a fixed ensemble and measurement.
//!
//! Outcomes with `p(b) = tr(rho E_b) <= 1e-15` contribute nothing to any
//! sum. Sums run in outcome order so results are bit-stable.

use crate::ensembles::{validate_povm, Ensemble, Povm, PureState, ResponseMap};
use crate::error::{Error, Result};
use crate::linalg::{self, HermitianOperator};

/// Outcome probabilities at or below this are treated as never occurring.
pub const NULL_OUTCOME: f64 = 1e-15;
const CLAMP_REPORT: f64 = 1e-9;

/// Best average fidelity for a fixed measurement, with the optimal pure
/// response per outcome.
#[derive(Clone, Debug)]
pub struct AchievabilityResult {
    pub value: f64,
    pub responses: Vec<PureState>,
    pub outcome_weights: Vec<f64>,
    /// Pre-clamp overshoot outside [0, 1], when larger than 1e-9.
    pub clamp_residual: Option<f64>,
}

fn check_dims(ens: &Ensemble, dim: usize) -> Result<()> {
    if ens.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: dim,
        });
    }
    Ok(())
}

/// Clamps to [0, 1]; returns the overshoot if it is larger than rounding.
pub(crate) fn clamp_unit(v: f64) -> (f64, Option<f64>) {
    let clamped = v.clamp(0.0, 1.0);
    let over = v - clamped;
    (clamped, (over.abs() > CLAMP_REPORT).then_some(over))
}

/// `sum_{b,i} pi_i tr(Pi_i E_b) tr(Pi_i sigma_b)`
pub fn average_fidelity(ens: &Ensemble, povm: &Povm, resp: &ResponseMap) -> Result<f64> {
    check_dims(ens, povm.dim())?;
    if resp.len() != povm.len() {
        return Err(Error::DimensionMismatch {
            expected: povm.len(),
            found: resp.len(),
        });
    }
    if let Some(sigma) = resp.responses().iter().find(|s| s.dim() != ens.dim()) {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: sigma.dim(),
        });
    }
    let mut total = 0.0;
    for (e, sigma) in povm.elements().iter().zip(resp.responses()) {
        for (p, s) in ens.items() {
            total += p * e.expectation(s.amplitudes()) * sigma.expectation(s.amplitudes());
        }
    }
    Ok(clamp_unit(total).0)
}

/// `M_b = sum_i pi_i tr(Pi_i E_b) Pi_i`
pub fn conditional_operator(ens: &Ensemble, element: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(ens, element.dim())?;
    Ok(conditional_unchecked(ens, element))
}

pub(crate) fn conditional_unchecked(ens: &Ensemble, element: &HermitianOperator) -> HermitianOperator {
    let mut m = HermitianOperator::zeros(ens.dim());
    for (p, s) in ens.items() {
        let w = p * element.expectation(s.amplitudes());
        if w != 0.0 {
            m.add_projector(w, s.amplitudes());
        }
    }
    m
}

/// `sum_b lambda_1(M_b)`, with the top eigenvectors as responses.
///
/// Fails on an invalid POVM.
pub fn achievable_fidelity(ens: &Ensemble, povm: &Povm) -> Result<AchievabilityResult> {
    check_dims(ens, povm.dim())?;
    let diags = validate_povm(povm);
    if !diags.is_empty() {
        return Err(Error::InvalidPovm(diags));
    }
    Ok(achievable_unchecked(ens, povm.elements()))
}

pub(crate) fn achievable_unchecked(ens: &Ensemble, elements: &[HermitianOperator]) -> AchievabilityResult {
    let rho = ens.density();
    let mut value = 0.0;
    let mut responses = Vec::with_capacity(elements.len());
    let mut outcome_weights = Vec::with_capacity(elements.len());
    for e in elements {
        let pb = rho.trace_product(e).max(0.0);
        outcome_weights.push(pb);
        if pb <= NULL_OUTCOME {
            responses.push(PureState::basis(ens.dim(), 0));
            continue;
        }
        let m = conditional_unchecked(ens, e);
        let (lambda, v) = linalg::top_eigenpair(&m).expect("finite operator");
        value += lambda;
        responses.push(PureState::normalized(v).expect("unit eigenvector"));
    }
    let (value, clamp_residual) = clamp_unit(value);
    AchievabilityResult {
        value,
        responses,
        outcome_weights,
        clamp_residual,
    }
}

/// Bayes posterior `p(i|b) = pi_i tr(Pi_i E_b) / tr(rho E_b)`.
pub fn posterior(ens: &Ensemble, povm: &Povm, outcome_index: usize) -> Result<Vec<f64>> {
    check_dims(ens, povm.dim())?;
    let e = povm.elements().get(outcome_index).ok_or_else(|| {
        Error::InvalidInput(format!(
            "outcome {outcome_index} out of range for {} outcomes",
            povm.len()
        ))
    })?;
    let joint: Vec<f64> = ens
        .items()
        .map(|(p, s)| (p * e.expectation(s.amplitudes())).max(0.0))
        .collect();
    let pb: f64 = joint.iter().sum();
    if pb <= NULL_OUTCOME {
        return Err(Error::UndefinedPosterior {
            outcome: outcome_index,
            probability: pb,
        });
    }
    Ok(joint.into_iter().map(|j| j / pb).collect())
}

/// Index maximizing `pi_i tr(Pi_i E)`, lowest index on ties.
pub(crate) fn best_guess(ens: &Ensemble, element: &HermitianOperator) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (p, s)) in ens.items().enumerate() {
        let v = p * element.expectation(s.amplitudes());
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// `P_s(E) = sum_b max_i pi_i tr(Pi_i E_b)`
pub fn success_probability(ens: &Ensemble, povm: &Povm) -> Result<f64> {
    check_dims(ens, povm.dim())?;
    Ok(success_unchecked(ens, povm.elements()))
}

pub(crate) fn success_unchecked(ens: &Ensemble, elements: &[HermitianOperator]) -> f64 {
    let total: f64 = elements.iter().map(|e| best_guess(ens, e).1).sum();
    clamp_unit(total).0
}

/// The guessed input per outcome under maximum likelihood (lowest index on
/// ties).
pub fn guesses(ens: &Ensemble, povm: &Povm) -> Result<Vec<usize>> {
    check_dims(ens, povm.dim())?;
    Ok(povm.elements().iter().map(|e| best_guess(ens, e).0).collect())
}

/// Per-input fidelity `f_i = sum_b tr(Pi_i E_b) |<phi_b|psi_i>|^2`, so that
/// the average fidelity is `sum_i pi_i f_i`.
pub fn state_fidelities(ens: &Ensemble, povm: &Povm, responses: &[PureState]) -> Vec<f64> {
    ens.states()
        .iter()
        .map(|s| {
            povm.elements()
                .iter()
                .zip(responses)
                .map(|(e, phi)| e.expectation(s.amplitudes()) * phi.overlap(s).norm_sqr())
                .sum()
        })
        .collect()
}
