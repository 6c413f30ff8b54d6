//! Ensemble file format.
//!
//! ```json
//! {"dimension": 2, "states": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "probs": [0.5, 0.5]}
//! ```
//!
//! One row per state, one `[re, im]` pair per amplitude. `probs` is
//! optional and defaults to uniform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, C64};

use super::{Ensemble, PureState};

const NORM_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dimension: usize,
    pub states: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
}

/// One invariant violation in an ensemble file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FileDiagnostic {
    NoStates,
    ZeroDimension,
    WrongLength { state: usize, expected: usize, found: usize },
    NonFinite { state: usize },
    NotNormalized { state: usize, residual: f64 },
    ProbCount { expected: usize, found: usize },
    NegativeProb { index: usize, value: f64 },
    ProbsNotNormalized { sum: f64, residual: f64 },
}

impl std::fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use FileDiagnostic::*;
        match self {
            NoStates => write!(f, "no states"),
            ZeroDimension => write!(f, "dimension must be >= 1"),
            WrongLength {
                state,
                expected,
                found,
            } => write!(f, "state {state} has {found} amplitudes, expected {expected}"),
            NonFinite { state } => write!(f, "state {state} has non-finite amplitudes"),
            NotNormalized { state, residual } => {
                write!(f, "state {state} is not normalized (|norm^2 - 1| = {residual:e})")
            }
            ProbCount { expected, found } => write!(f, "{found} probs for {expected} states"),
            NegativeProb { index, value } => write!(f, "prob {index} is negative ({value})"),
            ProbsNotNormalized { sum, residual } => {
                write!(f, "probs sum to {sum} (residual {residual:e})")
            }
        }
    }
}

pub fn parse_ensemble_json(text: &str) -> Result<EnsembleFile> {
    Ok(serde_json::from_str(text)?)
}

fn to_amplitudes(row: &[[f64; 2]]) -> Vec<C64> {
    row.iter().map(|&[re, im]| c64(re, im)).collect()
}

pub fn complex_to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Matrix rows as `[re, im]` pairs.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|row| row.into_iter().map(complex_to_pair).collect())
        .collect()
}

impl EnsembleFile {
    pub fn from_ensemble(ens: &Ensemble) -> Self {
        Self {
            dimension: ens.dim(),
            states: ens
                .states()
                .iter()
                .map(|s| s.amplitudes().iter().copied().map(complex_to_pair).collect())
                .collect(),
            probs: Some(ens.priors().to_vec()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ensemble file serializes")
    }

    /// Every invariant violation, with residuals.
    pub fn validate(&self) -> Vec<FileDiagnostic> {
        let mut out = Vec::new();
        if self.dimension == 0 {
            out.push(FileDiagnostic::ZeroDimension);
        }
        if self.states.is_empty() {
            out.push(FileDiagnostic::NoStates);
        }
        for (i, row) in self.states.iter().enumerate() {
            if row.len() != self.dimension {
                out.push(FileDiagnostic::WrongLength {
                    state: i,
                    expected: self.dimension,
                    found: row.len(),
                });
                continue;
            }
            if row.iter().flatten().any(|v| !v.is_finite()) {
                out.push(FileDiagnostic::NonFinite { state: i });
                continue;
            }
            let norm: f64 = row.iter().map(|[re, im]| re * re + im * im).sum();
            let residual = (norm - 1.0).abs();
            if residual > NORM_TOL {
                out.push(FileDiagnostic::NotNormalized { state: i, residual });
            }
        }
        if let Some(probs) = &self.probs {
            if probs.len() != self.states.len() {
                out.push(FileDiagnostic::ProbCount {
                    expected: self.states.len(),
                    found: probs.len(),
                });
            }
            for (index, &value) in probs.iter().enumerate() {
                if !(value >= 0.0) {
                    out.push(FileDiagnostic::NegativeProb { index, value });
                }
            }
            let sum: f64 = probs.iter().sum();
            let residual = (sum - 1.0).abs();
            if !(residual <= PROB_SUM_TOL) {
                out.push(FileDiagnostic::ProbsNotNormalized { sum, residual });
            }
        }
        out
    }

    /// The states alone, ignoring `probs`.
    pub fn to_states(&self) -> Result<Vec<PureState>> {
        self.check()?;
        self.states
            .iter()
            .map(|row| PureState::new(to_amplitudes(row)))
            .collect()
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let states = self.to_states()?;
        match &self.probs {
            Some(p) => Ensemble::new(p.clone(), states),
            None => Ensemble::uniform(states),
        }
    }

    fn check(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            return Ok(());
        }
        let msg = diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Err(Error::InvalidInput(msg))
    }
}
