//! Numerical maximization of the two-state cloning fidelity over 4x4
//! unitaries `U = exp(iH)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{canonical_pair, clone_fidelity, clone_try_unchecked};
use crate::ensembles::seeded_rng;
use crate::error::{Error, Result};
use crate::linalg::{c64, exp_i_hermitian, CMatrix, HermitianOperator};

use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::SolverConfig;

/// Real parameters of a 4x4 Hermitian generator.
pub const CLONE_PARAMS: usize = 16;
const START_SPREAD: f64 = 1.5;
const LOCAL_EVALS: usize = 4000;
const POLISH_ROUNDS: usize = 3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloneOptimum {
    pub x: f64,
    pub value: f64,
    pub closed_form: f64,
    /// `closed_form - value`.
    pub gap: f64,
    #[serde(skip)]
    pub unitary: Option<CMatrix>,
    pub evals: usize,
}

/// `exp(iH)` where `H` has diagonal `p[0..4]` and upper-triangle entries
/// `p[4 + 2k] + i p[5 + 2k]` in row-major order.
pub fn unitary_from_params(p: &[f64]) -> Result<CMatrix> {
    if p.len() != CLONE_PARAMS {
        return Err(Error::DimensionMismatch {
            expected: CLONE_PARAMS,
            found: p.len(),
        });
    }
    let mut h = CMatrix::zeros(4);
    let mut k = 4;
    for i in 0..4 {
        h[(i, i)] = c64(p[i], 0.0);
        for j in i + 1..4 {
            h[(i, j)] = c64(p[k], p[k + 1]);
            h[(j, i)] = c64(p[k], -p[k + 1]);
            k += 2;
        }
    }
    exp_i_hermitian(&HermitianOperator::new(h)?)
}

/// Seeded multi-start Nelder-Mead: the identity start plus `cfg.restarts`
/// random generators, each followed by simplex restarts at the optimum.
/// Ties go to the lowest start index.
pub fn optimize_clone_unitary(x: f64, cfg: &SolverConfig) -> Result<CloneOptimum> {
    cfg.validate()?;
    let closed_form = clone_fidelity(x)?;
    let pair = canonical_pair(x)?;
    let objective = |p: &[f64]| match unitary_from_params(p) {
        Ok(u) => -clone_try_unchecked(&pair, &u),
        Err(_) => f64::INFINITY,
    };

    let runs: Vec<(Vec<f64>, f64, usize)> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start: Vec<f64> = if r == 0 {
                vec![0.0; CLONE_PARAMS]
            } else {
                let mut rng = seeded_rng(cfg.seed, r as u64);
                (0..CLONE_PARAMS)
                    .map(|_| START_SPREAD * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            };
            let mut step = 0.5;
            let mut point = start;
            let mut evals = 0;
            let mut value = f64::INFINITY;
            for _ in 0..=POLISH_ROUNDS {
                let res = nelder_mead(
                    objective,
                    &point,
                    &NelderMeadOptions {
                        max_evals: LOCAL_EVALS,
                        initial_step: step,
                        f_tol: 1e-14,
                    },
                );
                evals += res.evals;
                if res.value <= value {
                    point = res.x;
                    value = res.value;
                }
                step *= 0.2;
            }
            (point, value, evals)
        })
        .collect();

    let evals = runs.iter().map(|r| r.2).sum();
    let (params, neg, _) = runs
        .into_iter()
        .reduce(|best, r| if r.1 < best.1 { r } else { best })
        .expect("at least one start");
    let value = -neg;
    Ok(CloneOptimum {
        x,
        value,
        closed_form,
        gap: closed_form - value,
        unitary: unitary_from_params(&params).ok(),
        evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters_give_identity() {
        let u = unitary_from_params(&[0.0; CLONE_PARAMS]).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn parametrization_is_unitary() {
        let p: Vec<f64> = (0..CLONE_PARAMS).map(|k| (k as f64 * 0.7).sin()).collect();
        let u = unitary_from_params(&p).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn orthogonal_pair_clones_perfectly() {
        let cfg = SolverConfig {
            restarts: 4,
            ..SolverConfig::default()
        };
        let r = optimize_clone_unitary(0.0, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.gap >= -1e-9);
    }
}
