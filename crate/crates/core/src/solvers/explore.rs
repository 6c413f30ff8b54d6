//! Heuristic search for state sets of small quantumness in a fixed
//! dimension. Results are upper bounds only.

use serde::{Deserialize, Serialize};

use crate::ensembles::{haar_state, seeded_rng, PureState};
use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

use super::quantumness::{quantumness_with, QuantumnessOptions};
use super::SolverConfig;

pub const HEURISTIC_LABEL: &str = "HEURISTIC UPPER BOUND";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExploreOptions {
    /// Random initial sets per size.
    pub draws: usize,
    /// Maximum coordinate sweeps per draw.
    pub hill_sweeps: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub quantumness: QuantumnessOptions,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            draws: 4,
            hill_sweeps: 30,
            initial_step: 0.3,
            min_step: 1e-3,
            quantumness: QuantumnessOptions {
                outer_iterations: 40,
                step_scale: 0.1,
                polish_evals: 30,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SizeRecord {
    pub size: usize,
    pub best_value: f64,
    /// Minimum over this and all earlier sizes.
    pub running_best: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct ExploreReport {
    pub label: &'static str,
    pub dim: usize,
    pub best_value: f64,
    pub best_states: Vec<PureState>,
    pub per_size: Vec<SizeRecord>,
}

struct Search<'a> {
    cfg: &'a SolverConfig,
    opts: &'a ExploreOptions,
    evaluations: usize,
}

impl Search<'_> {
    fn q(&mut self, states: &[PureState]) -> Result<f64> {
        self.evaluations += 1;
        Ok(quantumness_with(states, self.cfg, &self.opts.quantumness)?.value)
    }

    /// Coordinate-wise perturbation descent over the real and imaginary
    /// parts of every amplitude, halving the step after a sweep without
    /// improvement.
    fn descend(&mut self, mut states: Vec<PureState>, mut value: f64) -> Result<(Vec<PureState>, f64)> {
        let dim = states[0].dim();
        let mut step = self.opts.initial_step;
        for _ in 0..self.opts.hill_sweeps {
            if step < self.opts.min_step {
                break;
            }
            let mut improved = false;
            for k in 0..states.len() {
                for coord in 0..2 * dim {
                    for sign in [1.0, -1.0] {
                        let Some(moved) = perturb(&states[k], coord, sign * step) else {
                            continue;
                        };
                        let mut trial = states.clone();
                        trial[k] = moved;
                        let v = self.q(&trial)?;
                        if v < value {
                            states = trial;
                            value = v;
                            improved = true;
                            break;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok((states, value))
    }
}

fn perturb(state: &PureState, coord: usize, delta: f64) -> Option<PureState> {
    let mut amps: Vec<C64> = state.amplitudes().to_vec();
    let (i, imag) = (coord / 2, coord % 2 == 1);
    amps[i] += if imag { c64(0.0, delta) } else { c64(delta, 0.0) };
    PureState::normalized(amps).ok()
}

/// Random-restart hill descent on quantumness for each set size in turn.
/// Draw `j` for size `n` uses generator stream `n * 2^32 + j`.
pub fn explore_space_quantumness(
    dim: usize,
    set_sizes: &[usize],
    cfg: &SolverConfig,
    opts: &ExploreOptions,
) -> Result<ExploreReport> {
    cfg.validate()?;
    if dim < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: dim as f64,
            range: ">= 2",
        });
    }
    if set_sizes.is_empty() || set_sizes.contains(&0) {
        return Err(Error::InvalidInput("set sizes must be non-empty and >= 1".into()));
    }
    if opts.draws == 0 {
        return Err(Error::InvalidInput("draws must be >= 1".into()));
    }

    let mut best: Option<(f64, Vec<PureState>)> = None;
    let mut per_size = Vec::with_capacity(set_sizes.len());
    for &size in set_sizes {
        let mut search = Search {
            cfg,
            opts,
            evaluations: 0,
        };
        let mut size_best: Option<(f64, Vec<PureState>)> = None;
        for draw in 0..opts.draws {
            let mut rng = seeded_rng(cfg.seed, ((size as u64) << 32) | draw as u64);
            let states: Vec<PureState> = (0..size).map(|_| haar_state(&mut rng, dim)).collect();
            let value = search.q(&states)?;
            let (states, value) = if size == 1 {
                (states, value)
            } else {
                search.descend(states, value)?
            };
            if size_best.as_ref().is_none_or(|(v, _)| value < *v) {
                size_best = Some((value, states));
            }
        }
        let (value, states) = size_best.expect("draws >= 1");
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, states));
        }
        per_size.push(SizeRecord {
            size,
            best_value: value,
            running_best: best.as_ref().map_or(value, |b| b.0),
            evaluations: search.evaluations,
        });
    }
    let (best_value, best_states) = best.expect("non-empty sizes");
    Ok(ExploreReport {
        label: HEURISTIC_LABEL,
        dim,
        best_value,
        best_states,
        per_size,
    })
}
